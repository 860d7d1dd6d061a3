#include <cstdio>
int main() { std::puts("sl2wild: cli under construction"); return 0; }
