#include "topem/cli.hpp"

int main(int argc, char** argv) { return topem::cli::run(argc, argv); }
