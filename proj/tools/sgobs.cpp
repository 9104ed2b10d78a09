#include "sgobs/cli.hpp"

int main(int argc, char** argv) { return sgobs::cli::dispatch(argc, argv); }
