#include "phonojsd/cli.hpp"

int main(int argc, char** argv) { return phonojsd::cli_main(argc, argv); }
