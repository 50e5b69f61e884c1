#pragma once
//
// Command-line front end. run() takes the argument vector and output streams
// so tests can drive it in-process; main() in wlra_cli.cpp forwards to it.
//
// Exit codes: 0 success, 1 I/O, 2 validation, 3 numerical failure.
//

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wlra/baselines.hpp>
#include <wlra/ghs.hpp>
#include <wlra/io.hpp>
#include <wlra/range.hpp>
#include <wlra/selftest.hpp>
#include <wlra/synth.hpp>
#include <wlra/wlr.hpp>

namespace wlra::cli {

enum exit_code : int { ok = 0, io_failure = 1, invalid = 2, numerical = 3 };

// shortest decimal form that reads back as the same double
inline
std::string
short_double ( double x )
{
    char  buf[32];
    for ( int  prec = 1; prec <= 17; ++prec )
    {
        std::snprintf( buf, sizeof buf, "%.*g", prec, x );
        if ( std::strtod( buf, nullptr ) == x )
            break;
    }
    return buf;
}

struct BenchInput
{
    std::string  path;
    idx_t        m          = 50;
    idx_t        n          = 50;
    idx_t        true_rank  = 10;
    double       noise      = 0.2;
    double       kappa      = 0.0;
    bool         full_size  = false;

    void attach ( CLI::App *  sub )
    {
        sub->add_option( "-i,--input", path, "Matrix file (text, or CSV by .csv extension); synthetic when omitted" );
        sub->add_option( "--m", m, "Synthetic rows" )->capture_default_str();
        sub->add_option( "--n", n, "Synthetic columns" )->capture_default_str();
        sub->add_option( "--true-rank", true_rank, "Synthetic rank before noise" )->capture_default_str();
        sub->add_option( "--noise", noise, "Noise factor alpha/max(L*R^T)" )->capture_default_str();
        sub->add_option( "--kappa", kappa, "Use a conditioned rank-30 spectrum with this condition number instead" );
        sub->add_flag( "--full-size", full_size, "Synthetic 300x300 with true rank 30" );
    }

    Matrix load ( std::uint64_t seed ) const
    {
        if ( ! path.empty() )
            return load_matrix( path );
        const idx_t  mm = full_size ? 300 : m;
        const idx_t  nn = full_size ? 300 : n;
        if ( kappa > 0.0 )
            return gen_conditioned( { mm, nn, conditioned_spectrum( kappa ), sub_seed( seed, 100 ) } );
        return gen_low_rank_plus_noise( { mm, nn, full_size ? 30 : true_rank, noise, sub_seed( seed, 100 ) } );
    }
};

inline
void
emit ( std::string const &  path, std::string const &  content, std::ostream &  out )
{
    if ( path.empty() || path == "-" )
        out << content;
    else
        write_file_atomic( path, content );
}

inline
Matrix
load_weights ( std::string const &  path, std::optional< double > lambda, idx_t m, idx_t k )
{
    if ( ! path.empty() && lambda )
        throw validation_error( "give either --weights or --lambda, not both" );
    if ( ! path.empty() )
        return load_matrix( path );
    if ( lambda )
    {
        if ( ! ( *lambda > 0.0 ) )
            throw validation_error( "requires lambda > 0" );
        return Matrix( m, k, *lambda );
    }
    if ( k > 0 )
        throw validation_error( "k > 0 requires --weights or --lambda" );
    return Matrix( m, 0 );
}

inline
std::pair< Matrix, Matrix >
split_input ( Matrix const &  a, idx_t k )
{
    if ( k > a.cols() )
        throw validation_error( "requires k <= n (k = " + std::to_string( k ) + ", n = " + std::to_string( a.cols() ) + ")" );
    return split_columns( a, k );
}

inline
void
build_app ( CLI::App &  app )
{
    app.description( "Weighted low-rank matrix approximation with column-block weights" );
    app.require_subcommand( 1 );
    app.fallthrough( false );
    app.get_formatter()->column_width( 34 );
}

inline
int
run ( std::vector< std::string > const &  args, std::ostream &  out, std::ostream &  err )
{
    CLI::App  app{ "", "wlra" };
    build_app( app );

    // ghs
    std::string  in_path, out_path;
    idx_t        k = 0, r = 0;
    auto *       ghs = app.add_subcommand( "ghs", "Constrained closed form: keep A1, best rank-r fit overall" );
    ghs->add_option( "-i,--input", in_path, "Input matrix A = (A1 A2)" )->required();
    ghs->add_option( "-o,--output", out_path, "Solution matrix (X1 X2)" )->required();
    ghs->add_option( "-k,--k", k, "Columns in the preserved block A1" )->required();
    ghs->add_option( "-r,--r", r, "Target rank" )->required();

    // ghs-penalized
    double  tau = 0.0;
    auto *  ghp = app.add_subcommand( "ghs-penalized", "Rank-penalized limit: rank chosen by the sigma^2 > tau rule" );
    ghp->add_option( "-i,--input", in_path, "Input matrix A = (A1 A2)" )->required();
    ghp->add_option( "-o,--output", out_path, "Solution matrix (X1 X2)" )->required();
    ghp->add_option( "-k,--k", k, "Columns in the preserved block A1" )->required();
    ghp->add_option( "--tau", tau, "Rank penalty tau > 0" )->required();

    // wlr
    std::string              weights_path, trace_path;
    std::optional< double >  lambda;
    double                   epsilon   = 1e-16;
    std::size_t              max_iter  = 2500;
    std::uint64_t            seed      = 0;
    bool                     diagnostics = false;
    auto *  wlr = app.add_subcommand( "wlr", "Alternating minimisation for the weighted problem" );
    wlr->add_option( "-i,--input", in_path, "Input matrix A = (A1 A2)" )->required();
    wlr->add_option( "-o,--output", out_path, "Approximation (X1 X1*C+B*D)" )->required();
    wlr->add_option( "-k,--k", k, "Columns in the weighted block A1" )->required();
    wlr->add_option( "-r,--r", r, "Target rank" )->required();
    wlr->add_option( "--weights", weights_path, "Weight matrix W1 (m x k, positive)" );
    wlr->add_option( "--lambda", lambda, "Uniform weight for W1 instead of --weights" );
    wlr->add_option( "--epsilon", epsilon, "Stop when ||A_{p+1}-A_p|| or its relative form drops below this" )->capture_default_str();
    wlr->add_option( "--max-iter", max_iter, "Iteration cap" )->capture_default_str();
    wlr->add_option( "--seed", seed, "Seed for the random start" )->capture_default_str();
    wlr->add_flag( "--diagnostics", diagnostics, "Record descent terms and gradients per iteration" );
    wlr->add_option( "--trace", trace_path, "Iteration trace CSV (with --diagnostics; default <output>.trace.csv)" );

    // em
    double  tol = 1e-10, floor_eps = 1e-3;
    std::size_t  em_iter = 5000;
    auto *  em = app.add_subcommand( "em", "EM-style imputation baseline" );
    em->add_option( "-i,--input", in_path, "Input matrix A = (A1 A2)" )->required();
    em->add_option( "-o,--output", out_path, "Approximation" )->required();
    em->add_option( "-k,--k", k, "Columns in the weighted block A1" )->required();
    em->add_option( "-r,--r", r, "Target rank" )->required();
    em->add_option( "--weights", weights_path, "Weight matrix W1 (m x k, positive)" );
    em->add_option( "--lambda", lambda, "Uniform weight for W1 instead of --weights" );
    em->add_option( "--max-iter", em_iter, "Iteration cap" )->capture_default_str();
    em->add_option( "--tol", tol, "Stop when ||X_{t+1}-X_t|| drops below this" )->capture_default_str();
    em->add_option( "--weight-floor", floor_eps, "Start from zero when min rescaled weight is at most this" )->capture_default_str();

    // als
    double  als_tol = 1e-16;
    auto *  als = app.add_subcommand( "als", "Unweighted rank-r alternating least squares" );
    als->add_option( "-i,--input", in_path, "Input matrix" )->required();
    als->add_option( "-o,--output", out_path, "Approximation B*D" )->required();
    als->add_option( "-r,--r", r, "Target rank" )->required();
    als->add_option( "--max-iter", max_iter, "Iteration cap" )->capture_default_str();
    als->add_option( "--tol", als_tol, "Stop when ||B'D'-BD|| or its relative form drops below this" )->capture_default_str();
    als->add_option( "--seed", seed, "Seed for the random start" )->capture_default_str();

    // uniform-svd
    double  ulambda = 1.0;
    auto *  usvd = app.add_subcommand( "uniform-svd", "Closed form for uniform weight lambda on A1" );
    usvd->add_option( "-i,--input", in_path, "Input matrix A = (A1 A2)" )->required();
    usvd->add_option( "-o,--output", out_path, "Solution matrix (X1 X2)" )->required();
    usvd->add_option( "-k,--k", k, "Columns in the weighted block A1" )->required();
    usvd->add_option( "-r,--r", r, "Target rank" )->required();
    usvd->add_option( "--lambda", ulambda, "Uniform weight" )->required();

    // bench
    auto *  bench = app.add_subcommand( "bench", "Benchmark experiments, CSV output" );
    bench->require_subcommand( 1 );
    BenchInput   bin;
    bool         timings = false;
    std::string  lambdas_text, r_text, mode = "uniform";
    std::size_t  trials = 10;
    double       bench_eps = 1e-7;

    auto *  sweep = bench->add_subcommand( "sweep-lambda", "lambda * ||A_G - A_WLR|| across a lambda list" );
    bin.attach( sweep );
    sweep->add_option( "-o,--output", out_path, "CSV path (stdout when omitted)" );
    sweep->add_option( "-k,--k", k, "Columns in the weighted block" )->required();
    sweep->add_option( "-r,--r", r, "Target rank" )->required();
    sweep->add_option( "--lambdas", lambdas_text, "Lambda list: values and start:step:end ranges" )->required();
    sweep->add_option( "--trials", trials, "Trials averaged per lambda" )->capture_default_str();
    sweep->add_option( "--mode", mode, "uniform | interval" )->capture_default_str()->check( CLI::IsMember( { "uniform", "interval" } ) );
    sweep->add_option( "--epsilon", bench_eps, "WLR stopping threshold" )->capture_default_str();
    sweep->add_option( "--max-iter", max_iter, "WLR iteration cap" )->capture_default_str();
    sweep->add_option( "--seed", seed, "Master seed" )->capture_default_str();
    sweep->add_flag( "--timings", timings, "Add a wall_time_seconds column" );

    double       w_lo = 50, w_hi = 1000, cmp_eps = 1e-16;
    bool         no_em = false;
    auto *  cmp = bench->add_subcommand( "compare", "WLR, EM, ALS and the closed form over a rank list" );
    bin.attach( cmp );
    cmp->add_option( "-o,--output", out_path, "CSV path (stdout when omitted)" );
    cmp->add_option( "-k,--k", k, "Columns in the weighted block" )->required();
    cmp->add_option( "-r,--r", r_text, "Rank list: values and start:step:end ranges" )->required();
    cmp->add_option( "--w-lo", w_lo, "Lower end of the weight interval" )->capture_default_str();
    cmp->add_option( "--w-hi", w_hi, "Upper end of the weight interval" )->capture_default_str();
    cmp->add_option( "--epsilon", cmp_eps, "WLR and ALS stopping threshold" )->capture_default_str();
    cmp->add_option( "--max-iter", max_iter, "WLR and ALS iteration cap" )->capture_default_str();
    cmp->add_option( "--em-max-iter", em_iter, "EM iteration cap" )->capture_default_str();
    cmp->add_flag( "--no-em", no_em, "Skip the EM baseline" );
    cmp->add_option( "--seed", seed, "Master seed" )->capture_default_str();
    cmp->add_flag( "--timings", timings, "Add a wall_time_seconds column" );

    bool         closed_start = false;
    double       tr_eps = 1e-16;
    auto *  trc = bench->add_subcommand( "trace", "Per-iteration error trace of one WLR run" );
    bin.attach( trc );
    trc->add_option( "-o,--output", out_path, "CSV path (stdout when omitted)" );
    trc->add_option( "-k,--k", k, "Columns in the weighted block" )->required();
    trc->add_option( "-r,--r", r, "Target rank" )->required();
    trc->add_option( "--lambda", lambda, "Uniform weight (default 50 unless --w-lo/--w-hi)" );
    trc->add_option( "--w-lo", w_lo, "Draw weights in [w-lo, w-hi] instead" );
    trc->add_option( "--w-hi", w_hi, "Upper end of the weight interval" );
    trc->add_option( "--epsilon", tr_eps, "Stopping threshold" )->capture_default_str();
    trc->add_option( "--max-iter", max_iter, "Iteration cap" )->capture_default_str();
    trc->add_option( "--seed", seed, "Master seed" )->capture_default_str();
    trc->add_flag( "--start-closed-form", closed_start, "Start from the closed-form solution (uniform weights)" );

    // selftest
    std::vector< std::string >  suites;
    std::size_t                 st_trials = 0;
    auto *  stest = app.add_subcommand( "selftest", "Run the invariant suites" );
    stest->add_option( "--suite", suites, "descent | eckart-young | projection | gradient (repeatable; all when omitted)" )
         ->check( CLI::IsMember( selftest_suite_names() ) );
    stest->add_option( "--trials", st_trials, "Trials per suite (0: suite default)" )->capture_default_str();
    stest->add_option( "--seed", seed, "Seed" )->capture_default_str();

    // convert
    auto *  conv = app.add_subcommand( "convert", "Convert between the text and CSV matrix formats" );
    conv->add_option( "-i,--input", in_path, "Input matrix (.csv or text)" )->required();
    conv->add_option( "-o,--output", out_path, "Output matrix (.csv or text)" )->required();

    std::vector< char const * >  argv{ "wlra" };
    for ( auto const &  a : args )
        argv.push_back( a.c_str() );

    try
    {
        app.parse( int( argv.size() ), argv.data() );
    }
    catch ( CLI::CallForHelp const &  e )
    {
        return app.exit( e, out, err );
    }
    catch ( CLI::CallForAllHelp const &  e )
    {
        return app.exit( e, out, err );
    }
    catch ( CLI::ParseError const &  e )
    {
        err << "error: " << e.what() << "\n";
        return invalid;
    }

    try
    {
        if ( ghs->parsed() )
        {
            auto  a = load_matrix( in_path );
            auto  [ a1, a2 ] = split_input( a, k );
            auto  sol = solve_ghs( a1, a2, r );
            save_matrix( out_path, sol.combined() );
            out << "objective " << format_double( ghs_objective( a2, sol ) ) << "\n"
                << "spectral_gap " << format_double( sol.spectral_gap ) << "\n"
                << "unique " << ( sol.unique ? "true" : "false" ) << "\n";
        }
        else if ( ghp->parsed() )
        {
            auto  a = load_matrix( in_path );
            auto  [ a1, a2 ] = split_input( a, k );
            auto  pen = solve_rank_penalized_limit( a1, a2, tau );
            save_matrix( out_path, pen.solution.combined() );
            out << "tau " << short_double( pen.tau ) << "\n"
                << "r_star " << pen.r_star << "\n"
                << "rank " << k + pen.r_star << "\n"
                << "objective " << format_double( ghs_objective( a2, pen.solution ) ) << "\n"
                << "boundary_tie " << ( pen.boundary_tie ? "true" : "false" ) << "\n"
                << "unique " << ( pen.solution.unique ? "true" : "false" ) << "\n";
        }
        else if ( wlr->parsed() )
        {
            if ( ! ( epsilon > 0.0 ) )
                throw validation_error( "wlr: requires epsilon > 0" );
            if ( max_iter < 1 )
                throw validation_error( "wlr: requires max_iter >= 1" );
            if ( ! trace_path.empty() && ! diagnostics )
                throw validation_error( "wlr: --trace requires --diagnostics" );
            auto  a = load_matrix( in_path );
            auto  [ a1, a2 ] = split_input( a, k );
            auto  w1   = load_weights( weights_path, lambda, a.rows(), k );
            auto  prob = WlrProblem::make( std::move( a1 ), std::move( a2 ), std::move( w1 ), r );
            auto  rep  = solve( prob, seed, { epsilon, max_iter, diagnostics } );

            if ( diagnostics )
                write_file_atomic( trace_path.empty() ? out_path + ".trace.csv" : trace_path, report_csv( rep ) );
            save_matrix( out_path, rep.approximation() );

            out << "# wlr epsilon=" << short_double( epsilon ) << " max_iter=" << max_iter << " seed=" << seed
                << " k=" << k << " r=" << r << "\n"
                << "iterations " << rep.iterations() << "\n"
                << "stop_reason " << to_string( rep.stop_reason ) << "\n"
                << "objective " << format_double( rep.objective_trace.back() ) << "\n"
                << "final_error " << format_double( rep.error_trace.empty() ? 0.0 : rep.error_trace.back() ) << "\n"
                << "stationarity " << format_double( rep.stationarity_residuals.max() ) << "\n"
                << "fallback_sweeps " << rep.fallback_sweeps.size() << "\n";
        }
        else if ( em->parsed() )
        {
            auto  a  = load_matrix( in_path );
            if ( k > a.cols() )
                throw validation_error( "em: requires k <= n" );
            auto  w1  = load_weights( weights_path, lambda, a.rows(), k );
            auto  res = em_run( a, w1, r, { em_iter, tol, floor_eps } );
            save_matrix( out_path, res.x );
            out << "iterations " << res.iterations << "\n"
                << "converged " << ( res.converged ? "true" : "false" ) << "\n"
                << "objective " << format_double( res.objective_trace.back() ) << "\n";
        }
        else if ( als->parsed() )
        {
            auto  a   = load_matrix( in_path );
            auto  res = als_run( a, r, max_iter, als_tol, seed );
            save_matrix( out_path, res.approximation() );
            out << "iterations " << res.iterations << "\n"
                << "converged " << ( res.converged ? "true" : "false" ) << "\n"
                << "objective " << format_double( res.objective_trace.back() ) << "\n";
        }
        else if ( usvd->parsed() )
        {
            auto  a = load_matrix( in_path );
            auto  [ a1, a2 ] = split_input( a, k );
            auto  [ x1, x2 ] = solve_uniform_penalized( a1, a2, ulambda, r );
            save_matrix( out_path, hcat( x1, x2 ) );
            const double  obj = ulambda * ulambda * frobenius_norm_squared( a1 - x1 ) + frobenius_norm_squared( a2 - x2 );
            out << "objective " << format_double( obj ) << "\n";
        }
        else if ( sweep->parsed() )
        {
            auto  lambdas = parse_range( lambdas_text );
            if ( lambdas.empty() )
                throw validation_error( "sweep-lambda: requires a non-empty lambda list" );
            auto  a = bin.load( seed );
            auto  [ a1, a2 ] = split_input( a, k );
            SweepConfig  cfg;
            cfg.mode   = mode == "interval" ? WeightMode::interval : WeightMode::uniform;
            cfg.trials = trials;
            cfg.seed   = seed;
            cfg.stop   = { bench_eps, max_iter, false };
            emit( out_path, sweep_lambda( a1, a2, r, lambdas, cfg ).csv( timings ), out );
        }
        else if ( cmp->parsed() )
        {
            auto  rs = parse_index_range( r_text );
            auto  a  = bin.load( seed );
            CompareConfig  cfg;
            cfg.w_lo        = w_lo;
            cfg.w_hi        = w_hi;
            cfg.seed        = seed;
            cfg.stop        = { cmp_eps, max_iter, false };
            cfg.em.max_iter = em_iter;
            cfg.run_em      = ! no_em;
            emit( out_path, compare_solvers( a, k, rs, cfg ).csv( timings ), out );
        }
        else if ( trc->parsed() )
        {
            const bool  interval = trc->count( "--w-lo" ) + trc->count( "--w-hi" ) > 0;
            if ( interval && lambda )
                throw validation_error( "trace: give either --lambda or --w-lo/--w-hi" );
            auto  a = bin.load( seed );
            auto  [ a1, a2 ] = split_input( a, k );
            Matrix  w1( a.rows(), k, lambda.value_or( 50.0 ) );
            if ( interval )
            {
                if ( ! ( w_lo > 0.0 ) || ! ( w_hi >= w_lo ) )
                    throw validation_error( "trace: requires 0 < w_lo <= w_hi" );
                Rng  rng( sub_seed( seed, 0 ) );
                w1 = random_uniform( a.rows(), k, w_lo, w_hi, rng );
            }
            auto  prob = WlrProblem::make( a1, a2, std::move( w1 ), r );

            WlrState  init;
            if ( closed_start )
            {
                if ( ! is_uniform( prob.w1 ) )
                    throw validation_error( "trace: --start-closed-form requires uniform weights" );
                auto  [ x1, x2 ] = k == 0 ? split_columns( hard_threshold( prob.a2, r ), 0 )
                                          : solve_uniform_penalized( prob.a1, prob.a2, prob.w1( 0, 0 ), r );
                init = factor_state( x1, x2, r );
            }
            else
                init = default_init( prob, sub_seed( seed, 1 ) );

            emit( out_path, convergence_trace( prob, init, { tr_eps, max_iter, false } ).csv(), out );
        }
        else if ( stest->parsed() )
        {
            if ( suites.empty() )
                suites = selftest_suite_names();
            bool  all = true;
            for ( auto const &  s : suites )
            {
                auto  res = run_selftest_suite( s, st_trials, seed );
                out << summary_line( res ) << "\n";
                all = all && res.passed();
            }
            return all ? ok : numerical;
        }
        else if ( conv->parsed() )
            save_matrix( out_path, load_matrix( in_path ) );
    }
    catch ( io_error const &  e )
    {
        err << "error: " << e.what() << "\n";
        return io_failure;
    }
    catch ( convergence_error const &  e )
    {
        err << "error: " << e.what() << "\n";
        return numerical;
    }
    catch ( internal_error const &  e )
    {
        err << "error: " << e.what() << "\n";
        return numerical;
    }
    catch ( error const &  e )
    {
        err << "error: " << e.what() << "\n";
        return invalid;
    }
    return ok;
}

} // namespace wlra::cli
