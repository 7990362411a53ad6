// Independent and-parallelism: fib(N) from fib(N-1) and fib(N-2) computed in
// two threads.

#include <cstdlib>
#include <iostream>

#include "lpar/lpar.hpp"

int main(int argc, char** argv) {
  using namespace lpar;
  const std::int64_t n = argc > 1 ? std::atoll(argv[1]) : 25;
  if (n < 2) {
    std::cout << "fib(" << n << ") = " << std::max<std::int64_t>(n, 0) << '\n';
    return 0;
  }

  Runtime rt;
  auto parts = concurrent_and(rt, {Term::var(0), Term::var(0)}, {fib_naive(0, n - 1), fib_naive(0, n - 2)});
  if (!parts) return 1;
  std::cout << "fib(" << n << ") = " << (*parts)[0] << " + " << (*parts)[1] << " = "
            << (*parts)[0].int_value() + (*parts)[1].int_value() << '\n';
}
