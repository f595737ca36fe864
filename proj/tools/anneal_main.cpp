#include "anneal/cli.hpp"

int main(int argc, char** argv) { return anneal::cli_main(argc, argv); }
