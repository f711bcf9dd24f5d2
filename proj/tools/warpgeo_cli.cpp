#include "warpgeo/cli_impl.hpp"

int main(int argc, char** argv) { return warpgeo::cli::run_cli(argc, argv); }
