// uecorr_main.cpp — Binary entry point.

#include "uecorr/cli.hpp"

int main(int argc, char** argv) {
    return uecorr::run_cli(argc, argv);
}
