#include "commands.hpp"

int main(int argc, char** argv) { return bioremed::cli::run(argc, argv); }
