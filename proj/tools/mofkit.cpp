#include "mofkit/cli.hpp"

int main(int argc, char** argv) { return mofkit::cli::run(argc, argv); }
