#pragma once
//
// Module      : wlra/synth
// Description : synthetic matrix generators and the benchmark experiments
//               (λ-sweeps, solver comparison, convergence traces), CSV output
//

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "wlra/baselines.hpp"
#include "wlra/csv.hpp"
#include "wlra/ghs.hpp"
#include "wlra/qr.hpp"
#include "wlra/wlr.hpp"

namespace wlra {

struct SynthSpec
{
    idx_t          m          = 0;
    idx_t          n          = 0;
    idx_t          true_rank  = 0;
    double         noise_factor = 0.2;
    std::uint64_t  seed       = 0;

    void validate () const
    {
        if ( true_rank > std::min( m, n ) )
            throw validation_error( "synth: requires true_rank <= min(m, n)" );
        if ( ! ( noise_factor >= 0.0 ) || ! std::isfinite( noise_factor ) )
            throw validation_error( "synth: requires noise_factor >= 0" );
    }
};

// A = L·Rᵀ + α·E,  α = noise_factor · max_ij (L·Rᵀ)_ij
inline
Matrix
gen_low_rank_plus_noise ( SynthSpec const &  spec )
{
    spec.validate();
    Rng     rng( spec.seed );
    auto    l  = random_normal( spec.m, spec.true_rank, rng );
    auto    rt = random_normal( spec.true_rank, spec.n, rng );
    Matrix  a  = l * rt;

    if ( spec.noise_factor > 0.0 )
    {
        double  amax = 0.0;
        for ( auto  v : a.data() )
            amax = std::max( amax, v );
        auto  e = random_normal( spec.m, spec.n, rng );
        a += e * ( spec.noise_factor * amax );
    }
    return a;
}

struct SpectrumSpec
{
    idx_t                  m = 0;
    idx_t                  n = 0;
    std::vector< double >  singular_values;
    std::uint64_t          seed = 0;

    void validate () const
    {
        if ( singular_values.size() > std::min( m, n ) )
            throw validation_error( "synth: requires len(singular_values) <= min(m, n)" );
        for ( std::size_t  i = 0; i < singular_values.size(); ++i )
        {
            if ( ! ( singular_values[i] >= 0.0 ) || ! std::isfinite( singular_values[i] ) )
                throw validation_error( "synth: singular values must be finite and non-negative" );
            if ( i > 0 && singular_values[i] > singular_values[i - 1] )
                throw validation_error( "synth: singular values must be non-increasing" );
        }
    }
};

// A = U·diag(σ)·Vᵀ with U, V the Q factors of seeded Gaussian matrices
inline
Matrix
gen_conditioned ( SpectrumSpec const &  spec )
{
    spec.validate();
    const idx_t  q = spec.singular_values.size();
    Rng          rng( spec.seed );
    auto         u = qr( random_normal( spec.m, q, rng ) ).q;
    auto         v = qr( random_normal( spec.n, q, rng ) ).q;
    for ( idx_t  i = 0; i < u.rows(); ++i )
        for ( idx_t  j = 0; j < q; ++j )
            u( i, j ) *= spec.singular_values[j];
    return times_transpose( u, v );
}

//
// `distinct` geometrically spaced values from kappa down to kappa^(1/distinct),
// followed by `repeated` copies of 1, so that σ_max/σ_min = kappa.
//
inline
std::vector< double >
conditioned_spectrum ( double kappa, std::size_t distinct = 20, std::size_t repeated = 10 )
{
    if ( ! ( kappa > 1.0 ) || ! std::isfinite( kappa ) )
        throw validation_error( "synth: requires kappa > 1" );
    std::vector< double >  s;
    for ( std::size_t  i = 0; i < distinct; ++i )
        s.push_back( std::pow( kappa, double( distinct - i ) / double( distinct ) ) );
    s.insert( s.end(), repeated, 1.0 );
    return s;
}

struct SweepRow
{
    std::string  experiment;
    double       sweep_parameter = 0.0;
    std::string  solver;
    std::string  metric_name;
    double       metric     = 0.0;
    double       iterations = 0.0;   // mean over trials
    double       wall_time  = 0.0;   // seconds, monotonic clock

    auto key () const { return std::tie( experiment, sweep_parameter, solver, metric_name ); }
};

struct SweepResult
{
    std::vector< SweepRow >  rows;

    void append ( SweepResult const &  other ) { rows.insert( rows.end(), other.rows.begin(), other.rows.end() ); }

    // rows sorted by (experiment, sweep_parameter, solver, metric_name); wall
    // time only when asked for, since it differs between runs
    std::string csv ( bool timings = false ) const
    {
        auto  sorted = rows;
        std::stable_sort( sorted.begin(), sorted.end(), [] ( SweepRow const &  a, SweepRow const &  b ) { return a.key() < b.key(); } );

        std::vector< std::string >  header{ "experiment", "sweep_parameter", "solver", "metric_name", "metric", "iterations" };
        if ( timings )
            header.push_back( "wall_time_seconds" );
        CsvWriter  out( header );
        for ( auto const &  r : sorted )
        {
            std::vector< CsvWriter::field >  row{ r.experiment, r.sweep_parameter, r.solver, r.metric_name, r.metric, r.iterations };
            if ( timings )
                row.push_back( r.wall_time );
            out.add_row( row );
        }
        return out.str();
    }
};

namespace detail {

class Stopwatch
{
    std::chrono::steady_clock::time_point  start_ = std::chrono::steady_clock::now();
public:
    double seconds () const
    {
        return std::chrono::duration< double >( std::chrono::steady_clock::now() - start_ ).count();
    }
};

} // namespace detail

enum class WeightMode { uniform, interval };

struct SweepConfig
{
    WeightMode        mode   = WeightMode::uniform;
    std::size_t       trials = 10;
    std::uint64_t     seed   = 0;
    // interval mode draws (W1)_ij in [λ, λ + interval_width]
    double            interval_width = 20.0;
    StoppingCriteria  stop{ 1e-7, 2500, false };
};

//
// For each λ: run WLR with W1 = λ𝟙 (or entries in [λ, λ + width]) and
// record λ·‖A_G − A_WLR‖_F averaged over trials, A_G the constrained
// closed-form solution.
//
inline
SweepResult
sweep_lambda ( Matrix const &  a1, Matrix const &  a2, idx_t r, std::vector< double > const &  lambdas, SweepConfig const &  cfg = {} )
{
    if ( lambdas.empty() )
        throw validation_error( "sweep-lambda: requires a non-empty lambda list" );
    for ( std::size_t  i = 0; i < lambdas.size(); ++i )
    {
        if ( ! ( lambdas[i] > 0.0 ) || ! std::isfinite( lambdas[i] ) )
            throw validation_error( "sweep-lambda: lambdas must be positive" );
        if ( i > 0 && ! ( lambdas[i] > lambdas[i - 1] ) )
            throw validation_error( "sweep-lambda: lambdas must be increasing" );
    }
    if ( cfg.trials < 1 )
        throw validation_error( "sweep-lambda: requires trials >= 1" );

    const auto    ag      = solve_ghs( a1, a2, r ).combined();
    const char *  exp_id  = cfg.mode == WeightMode::uniform ? "sweep_lambda_uniform" : "sweep_lambda_interval";

    SweepResult  out;
    for ( std::size_t  li = 0; li < lambdas.size(); ++li )
    {
        const double       lambda = lambdas[li];
        double             metric = 0.0;
        double             iters  = 0.0;
        detail::Stopwatch  clock;

        for ( std::size_t  t = 0; t < cfg.trials; ++t )
        {
            const auto  trial_seed = sub_seed( cfg.seed, li * cfg.trials + t );
            Matrix      w1( a1.rows(), a1.cols(), lambda );
            if ( cfg.mode == WeightMode::interval )
            {
                Rng  rng( sub_seed( trial_seed, 1 ) );
                w1 = random_uniform( a1.rows(), a1.cols(), lambda, lambda + cfg.interval_width, rng );
            }
            auto  rep = solve( WlrProblem::make( a1, a2, std::move( w1 ), r ), trial_seed, cfg.stop );
            metric += lambda * frobenius_norm( ag - rep.approximation() );
            iters  += double( rep.iterations() );
        }

        out.rows.push_back( { exp_id, lambda, "wlr", "lambda_dist_to_ag", metric / double( cfg.trials ),
                              iters / double( cfg.trials ), clock.seconds() } );
    }
    return out;
}

struct CompareConfig
{
    double            w_lo = 50.0;
    double            w_hi = 1000.0;
    std::uint64_t     seed = 0;
    StoppingCriteria  stop{ 1e-16, 2500, false };
    EmConfig          em;
    bool              run_em = true;
};

//
// For each r: WLR, EM, ALS (k = 0 only) and the closed-form constrained
// reference, each scored by RMSE against A and against A_G.
//
inline
SweepResult
compare_solvers ( Matrix const &  a, idx_t k, std::vector< idx_t > const &  r_list, CompareConfig const &  cfg = {} )
{
    if ( r_list.empty() )
        throw validation_error( "compare: requires a non-empty r list" );
    if ( k > a.cols() )
        throw validation_error( "compare: requires k <= n" );
    for ( auto  r : r_list )
        if ( r < k || r > std::min( a.rows(), a.cols() ) )
            throw validation_error( "compare: r values must lie in [k, min(m, n)]" );
    if ( ! ( cfg.w_lo > 0.0 ) || ! ( cfg.w_hi >= cfg.w_lo ) )
        throw validation_error( "compare: requires 0 < w_lo <= w_hi" );

    auto    [ a1, a2 ] = split_columns( a, k );
    Rng     rng( sub_seed( cfg.seed, 0 ) );
    Matrix  w1 = random_uniform( a.rows(), k, cfg.w_lo, cfg.w_hi, rng );

    SweepResult  out;
    auto  record = [&] ( double r, char const *  solver, Matrix const &  x, Matrix const &  ag, double iters, double secs )
    {
        out.rows.push_back( { "compare", r, solver, "rmse_vs_a", rmse( a, x ), iters, secs } );
        out.rows.push_back( { "compare", r, solver, "rmse_vs_ag", rmse( ag, x ), iters, secs } );
    };

    for ( auto  r : r_list )
    {
        const double  rp = double( r );

        detail::Stopwatch  c_ghs;
        const auto         ag = solve_ghs( a1, a2, r ).combined();
        record( rp, "ghs", ag, ag, 0.0, c_ghs.seconds() );

        detail::Stopwatch  c_wlr;
        auto               rep = solve( WlrProblem::make( a1, a2, w1, r ), sub_seed( cfg.seed, 1 ), cfg.stop );
        record( rp, "wlr", rep.approximation(), ag, double( rep.iterations() ), c_wlr.seconds() );

        if ( cfg.run_em )
        {
            detail::Stopwatch  c_em;
            auto               em = em_run( a, w1, r, cfg.em );
            record( rp, "em", em.x, ag, double( em.iterations ), c_em.seconds() );
        }

        if ( k == 0 )
        {
            detail::Stopwatch  c_als;
            auto               als = als_run( a, r, cfg.stop.max_iter, cfg.stop.epsilon, sub_seed( cfg.seed, 2 ) );
            record( rp, "als", als.approximation(), ag, double( als.iterations ), c_als.seconds() );
        }
    }
    return out;
}

// true when every entry of W1 is the same (closed form available)
inline
bool
is_uniform ( Matrix const &  w1 )
{
    return std::all_of( w1.data().begin(), w1.data().end(), [&] ( double w ) { return w == w1.data().front(); } );
}

//
// Per-iteration relative error Error_p/‖(A_WLR)_p‖_F and, when W1 is uniform,
// relative distance to the closed-form solution X_SVD.
//
inline
SweepResult
convergence_trace ( WlrProblem const &  prob, WlrState const &  init, StoppingCriteria const &  stop )
{
    prob.validate();

    std::optional< Matrix >  xsvd;
    if ( prob.k() == 0 )
        xsvd = hard_threshold( prob.a2, prob.r );
    else if ( is_uniform( prob.w1 ) )
    {
        auto  [ x1, x2 ] = solve_uniform_penalized( prob.a1, prob.a2, prob.w1( 0, 0 ), prob.r );
        xsvd = hcat( x1, x2 );
    }
    const double  xsvd_norm = xsvd ? frobenius_norm( *xsvd ) : 0.0;

    SweepResult  out;
    std::size_t  p      = 0;
    Matrix       a_prev = init.combined();

    auto  obs = [&] ( WlrState const &  st, double obj, double err )
    {
        ++p;
        const double  nrm = frobenius_norm( a_prev );
        Matrix        a_p = st.combined();
        out.rows.push_back( { "trace", double( p ), "wlr", "objective", obj, double( p ), 0.0 } );
        out.rows.push_back( { "trace", double( p ), "wlr", "relative_error", nrm > 0.0 ? err / nrm : err, double( p ), 0.0 } );
        if ( xsvd )
        {
            const double  d = frobenius_norm( a_p - *xsvd );
            out.rows.push_back( { "trace", double( p ), "wlr", "relative_dist_to_xsvd", xsvd_norm > 0.0 ? d / xsvd_norm : d, double( p ), 0.0 } );
        }
        a_prev = std::move( a_p );
    };

    solve( prob, init, stop, obs );
    return out;
}

} // namespace wlra
