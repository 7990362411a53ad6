// Pipelined conjunction: member(X, [1,2]), member(X, [2,3]).
// Each goal runs in its own stage thread; prints X = 2.

#include <iostream>

#include "lpar/lpar.hpp"

int main() {
  using namespace lpar;
  Runtime rt;

  auto pipe = piped(rt,
                    {member(0, Term::list({Term::integer(1), Term::integer(2)})),
                     member(0, Term::list({Term::integer(2), Term::integer(3)}))},
                    1);
  while (auto b = pipe.next()) std::cout << "X = " << b->value(0) << '\n';
  pipe.stop();

  // The same conjunction collected in sequential order.
  const auto xs = piped_findall(rt, Term::var(0),
                                {member(0, Term::list({Term::integer(1), Term::integer(2), Term::integer(3)})),
                                 between(0, 2, 5)},
                                1);
  std::cout << "findall: " << Term::list(xs) << '\n';
}
