#include "reinit/cli.hpp"

int main(int argc, char** argv) { return reinit::run_cli(argc, argv); }
