// Solves the six-point 2-means instance whose optimal means are not
// expressible in radicals, then shows FM stuck on the rectangle instance.

#include <cstdio>

#include "fuzzykm.hpp"

int main() {
    using namespace fuzzykm;

    const WeightedPointSet x = instances::radicals();
    const FuzzySolution s = grid_refine_1d(x, 2, 2, Bracket{-4.0, 4.0}, 801);
    const double mu = std::max(s.means()[0][0], s.means()[1][0]);
    std::printf("radicals: means %.12f %.12f  cost %.12f  g(mu) %.3e\n", s.means()[0][0],
                s.means()[1][0], s.cost(), instances::radicals_polynomial(mu));

    for (double a : {4.0, 8.0, 16.0}) {
        const WeightedPointSet rect = instances::poor_local(a);
        FmConfig bad, good;
        bad.init = ExplicitMeans{instances::poor_local_bad_init(a)};
        good.init = ExplicitMeans{instances::poor_local_good_init(a)};
        const double cb = run_fm(rect, bad, 2, 2).solution.cost();
        const double cg = run_fm(rect, good, 2, 2).solution.cost();
        std::printf("rectangle a=%-4g bad %.6f  good %.6f  ratio %.3f\n", a, cb, cg, cb / cg);
    }
}
