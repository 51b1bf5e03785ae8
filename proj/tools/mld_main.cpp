#include "mld/cli.hpp"

int main(int argc, char** argv) { return mld::cli::run(argc, argv); }
