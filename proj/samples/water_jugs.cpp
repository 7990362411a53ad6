// Competitive or-parallelism: three jug solvers race, the first plan wins and
// the others are stopped.
//
//   sample_water_jugs [target] [capacity...]

#include <cstdlib>
#include <iostream>

#include "lpar/lpar.hpp"

int main(int argc, char** argv) {
  using namespace lpar;
  const int target = argc > 1 ? std::atoi(argv[1]) : 4;
  std::vector<int> caps;
  for (int i = 2; i < argc; ++i) caps.push_back(std::atoi(argv[i]));
  if (caps.empty()) caps = {5, 9};

  Runtime rt;
  auto plan = first_solution(rt, Term::var(0),
                             {jug_search_hc(0, caps, target), jug_search_df(0, caps, target),
                              jug_search_bf(0, caps, target)});
  if (!plan) {
    std::cout << "no way to measure " << target << " liters\n";
    return 1;
  }
  std::cout << *plan << '\n';

  jugs::State s(caps.size(), 0);
  for (const auto& m : jugs::plan_from_term(*plan)) {
    jugs::apply(caps, s, m);
    std::cout << "  " << jugs::move_term(m) << "\t->";
    for (int c : s) std::cout << ' ' << c;
    std::cout << '\n';
  }
}
