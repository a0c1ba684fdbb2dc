#include "epidde/cli.hpp"

int main(int argc, char** argv) { return epidde::cli_dispatch(argc, argv); }
