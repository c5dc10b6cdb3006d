// Acceptance suite runner: one pass/fail line per criterion.
#include "dormantwalk/acceptance.hpp"

int main() { return dormantwalk::acceptance::run_and_report() == 0 ? 0 : 1; }
