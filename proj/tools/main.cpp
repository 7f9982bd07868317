#include <iostream>

int main() {
    std::cout << "sde1d: placeholder\n";
    return 0;
}
