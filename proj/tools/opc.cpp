#include <cstdio>
int main() { std::puts("opc placeholder"); return 0; }
