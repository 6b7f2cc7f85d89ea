#include "gkbm/cli.hpp"

int main(int argc, char** argv) { return gkbm::cli_main(argc, argv); }
