#include "itcs/cli.hpp"

int main(int argc, char** argv) { return itcs::cli::main_entry(argc, argv); }
