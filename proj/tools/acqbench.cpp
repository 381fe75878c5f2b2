#include "acqbench/cli.hpp"

int main(int argc, char** argv) { return acqbench::cli::main(argc, argv); }
