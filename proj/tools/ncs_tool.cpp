#include "ncs/cli.hpp"

int main(int argc, char** argv) { return ncs::cli::run(argc, argv); }
