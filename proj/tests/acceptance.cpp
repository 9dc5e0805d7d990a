// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "omkit/selftest.hpp"

#include <iostream>

int main()
{
    return omkit::run_acceptance_suite(std::cout) == 0 ? 0 : 1;
}
