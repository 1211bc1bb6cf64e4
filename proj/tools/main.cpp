#include <cstdio>

int main() {
    std::puts("msgl: subcommands not wired up yet");
    return 2;
}
