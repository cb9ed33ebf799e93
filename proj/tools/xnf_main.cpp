#include <cstdio>

int main() {
    std::puts("xnf: placeholder build");
    return 2;
}
