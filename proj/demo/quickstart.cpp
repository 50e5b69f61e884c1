// Solve one weighted problem three ways and compare against the constrained
// closed form.

#include <cstdio>

#include <wlra/baselines.hpp>
#include <wlra/ghs.hpp>
#include <wlra/synth.hpp>
#include <wlra/wlr.hpp>

int main ()
{
    using namespace wlra;

    const idx_t  k = 5, r = 10;
    auto         a = gen_low_rank_plus_noise( { 40, 40, 10, 0.2, 1 } );
    auto         [ a1, a2 ] = split_columns( a, k );

    Rng   rng( 2 );
    auto  w1 = random_uniform( a.rows(), k, 50.0, 1000.0, rng );

    auto  ag  = solve_ghs( a1, a2, r ).combined();
    auto  rep = solve( WlrProblem::make( a1, a2, w1, r ), 3, { 1e-16, 2500, false } );
    auto  em  = em_run( a, w1, r, { 500, 1e-10, 1e-3 } );

    std::printf( "wlr: %zu iterations (%s), rmse vs A_G %.3g\n", rep.iterations(), to_string( rep.stop_reason ).c_str(),
                 rmse( ag, rep.approximation() ) );
    std::printf( "em:  %zu iterations, rmse vs A_G %.3g\n", em.iterations, rmse( ag, em.x ) );
    return 0;
}
