#include "waveleton/cli.hpp"

int main(int argc, char** argv) {
    return waveleton::run(std::vector<std::string>(argv + 1, argv + argc));
}
