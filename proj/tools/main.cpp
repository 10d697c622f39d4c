#include "softtile/cli.hpp"

int main(int argc, char** argv) { return softtile::cli_main(argc, argv); }
