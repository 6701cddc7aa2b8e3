#include <iostream>

int main() {
    std::cout << "openmap cli: subcommands land here\n";
    return 0;
}
