#include "fpp/cli.hpp"

int main(int argc, char** argv) { return fpp::dispatch(argc, argv); }
