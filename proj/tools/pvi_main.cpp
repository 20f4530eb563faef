#include "pvi/cli.hpp"

int main(int argc, char** argv) { return pvi::cli_main(argc, argv); }
