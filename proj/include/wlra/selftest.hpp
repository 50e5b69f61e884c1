#pragma once
//
// Module      : wlra/selftest
// Description : invariant suites runnable on demand: descent identity,
//               Eckart-Young optimality, projection perturbation bound and
//               finite-difference gradient checks
//
// Defining WLRA_SELFTEST_INJECT_FAULT corrupts the descent decomposition so
// the negative control can confirm that a broken invariant is reported.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wlra/projection.hpp"
#include "wlra/svd.hpp"
#include "wlra/wlr.hpp"

namespace wlra {

struct SuiteResult
{
    std::string  name;
    std::size_t  checks   = 0;
    std::size_t  failures = 0;
    double       worst    = 0.0;   // largest violation ratio seen (≤ 1 passes)
    std::string  first_failure;

    explicit SuiteResult ( std::string suite ) : name( std::move( suite ) ) {}

    bool passed () const noexcept { return failures == 0; }

    void check ( double value, double bound, std::string const &  what )
    {
        ++checks;
        const double  ratio = bound > 0.0 ? value / bound : ( value > 0.0 ? INFINITY : 0.0 );
        worst = std::max( worst, ratio );
        if ( ! ( value <= bound ) )
        {
            if ( failures == 0 )
                first_failure = what;
            ++failures;
        }
    }
};

namespace detail {

inline
WlrProblem
selftest_problem ( Rng &  rng, idx_t max_m, idx_t max_n, idx_t max_k, idx_t max_r, double wlo, double whi )
{
    const idx_t  m = 2 + idx_t( rng.uniform() * double( max_m - 1 ) );
    const idx_t  n = 2 + idx_t( rng.uniform() * double( max_n - 1 ) );
    const idx_t  kmax = std::min( { max_k, max_r, m, n - 1 } );
    const idx_t  k    = idx_t( rng.uniform() * double( kmax + 1 ) );
    const idx_t  rmax = std::min( { max_r, m, n } );
    const idx_t  r    = k + idx_t( rng.uniform() * double( rmax - k + 1 ) );

    auto  a = random_normal( m, n, rng );
    auto  [ a1, a2 ] = split_columns( a, k );
    return WlrProblem::make( std::move( a1 ), std::move( a2 ), random_uniform( m, k, wlo, whi, rng ), r );
}

} // namespace detail

//
// Every sweep of each run: |Σ d_i − (m_p − m_{p+1})| ≤ 1e-8·max(1, m_p),
// plus monotonicity and the two lower bounds on the decrease.
//
inline
SuiteResult
selftest_descent ( std::size_t trials, std::uint64_t seed, std::size_t iterations = 40 )
{
    SuiteResult  res{ "descent" };
    Rng          rng( seed );
    for ( std::size_t  t = 0; t < trials; ++t )
    {
        auto  prob = detail::selftest_problem( rng, 50, 50, 10, 20, 1.0, 1000.0 );
        auto  st   = default_init( prob, sub_seed( seed, t ) );
        for ( std::size_t  p = 0; p < iterations; ++p )
        {
            auto  nx = sweep( prob, st ).state;
            auto  dd = descent_decomposition( prob, st, nx );
#ifdef WLRA_SELFTEST_INJECT_FAULT
            dd.d1 += 1e-3 * std::max( 1.0, dd.m_p );
#endif
            const std::string  tag = "trial " + std::to_string( t ) + " sweep " + std::to_string( p );
            res.check( std::abs( dd.sum() - dd.decrease() ), 1e-8 * std::max( 1.0, dd.m_p ), tag + ": descent identity" );
            res.check( dd.m_p1 - dd.m_p, 1e-10 * std::max( 1.0, dd.m_p ), tag + ": monotonicity" );
            res.check( 0.5 * frobenius_norm_squared( nx.b * nx.d - st.b * st.d ) - dd.decrease(), 1e-8 * std::max( 1.0, dd.m_p ),
                       tag + ": B·D step bound" );
            res.check( frobenius_norm_squared( hadamard( st.x1 - nx.x1, prob.w1 ) ) - dd.decrease(), 1e-8 * std::max( 1.0, dd.m_p ),
                       tag + ": X1 step bound" );
            st = std::move( nx );
        }
    }
    return res;
}

// H_r(A) beats random rank-r candidates and attains the singular-value tail
inline
SuiteResult
selftest_eckart_young ( std::size_t trials, std::uint64_t seed, std::size_t candidates = 200 )
{
    SuiteResult  res{ "eckart-young" };
    Rng          rng( seed );
    for ( std::size_t  t = 0; t < trials; ++t )
    {
        const idx_t   m    = 2 + idx_t( rng.uniform() * 10 );
        const idx_t   n    = 2 + idx_t( rng.uniform() * 10 );
        const idx_t   r    = idx_t( rng.uniform() * double( std::min( m, n ) + 1 ) );
        auto          a    = random_normal( m, n, rng );
        auto          h    = hard_threshold( a, r );
        const double  best = frobenius_norm_squared( a - h );
        const double  tail = tail_energy( singular_values( a ), r );
        const std::string  tag = "trial " + std::to_string( t );

        res.check( std::abs( best - tail ), 1e-8 * std::max( 1.0, tail ), tag + ": tail identity" );
        res.check( double( numerical_rank( h ) ), double( r ), tag + ": rank bound" );
        for ( std::size_t  c = 0; c < candidates; ++c )
        {
            auto  y = random_normal( m, r, rng ) * random_normal( r, n, rng );
            res.check( best - frobenius_norm_squared( a - y ), 1e-10 * std::max( 1.0, best ), tag + ": candidate" );
        }
    }
    return res;
}

// ‖P_B − P_B̃‖_F ≤ 2‖B − B̃‖_F / σ_min(B̃), perturbations of norm 1e-6..1e-1
inline
SuiteResult
selftest_projection ( std::size_t trials, std::uint64_t seed )
{
    SuiteResult  res{ "projection" };
    Rng          rng( seed );
    for ( std::size_t  t = 0; t < trials; ++t )
    {
        const idx_t   m   = 3 + idx_t( rng.uniform() * 8 );
        const idx_t   k   = 1 + idx_t( rng.uniform() * double( m - 1 ) );
        auto          b   = random_normal( m, k, rng );
        auto          e   = random_normal( m, k, rng );
        const double  mag = std::pow( 10.0, rng.uniform( -6, -1 ) );
        e *= mag / frobenius_norm( e );
        auto          bt  = b + e;
        const double  eta = singular_values( bt ).back();
        const double  lhs = frobenius_norm( projector( b ) - projector( bt ) );
        res.check( lhs, 2.0 * frobenius_norm( e ) / eta, "trial " + std::to_string( t ) );
    }
    return res;
}

// analytic gradients of F against central differences, step 1e-6
inline
SuiteResult
selftest_gradient ( std::size_t trials, std::uint64_t seed )
{
    SuiteResult  res{ "gradient" };
    Rng          rng( seed );
    for ( std::size_t  t = 0; t < trials; ++t )
    {
        auto  a = random_normal( 5, 5, rng );
        auto  [ a1, a2 ] = split_columns( a, 2 );
        auto  prob = WlrProblem::make( a1, a2, random_uniform( 5, 2, 0.5, 3.0, rng ), 3 );
        WlrState  st{ random_normal( 5, 2, rng ), random_normal( 2, 3, rng ), random_normal( 5, 1, rng ), random_normal( 1, 3, rng ), 0 };
        auto  g = gradients( prob, st );

        auto  fd_block = [&] ( Matrix const &  an, Matrix WlrState::*  block, char const *  name )
        {
            Matrix  fd( an.rows(), an.cols() );
            for ( idx_t  i = 0; i < an.rows(); ++i )
                for ( idx_t  j = 0; j < an.cols(); ++j )
                {
                    WlrState      s  = st;
                    const double  x0 = ( s.*block )( i, j );
                    ( s.*block )( i, j ) = x0 + 1e-6;
                    const double  fp = objective( prob, s );
                    ( s.*block )( i, j ) = x0 - 1e-6;
                    const double  fm = objective( prob, s );
                    fd( i, j ) = ( fp - fm ) / 2e-6;
                }
            res.check( frobenius_norm( fd - an ), 1e-5 * std::max( 1.0, frobenius_norm( an ) ),
                       "trial " + std::to_string( t ) + ": " + name );
        };
        fd_block( g.x1, &WlrState::x1, "X1" );
        fd_block( g.c, &WlrState::c, "C" );
        fd_block( g.b, &WlrState::b, "B" );
        fd_block( g.d, &WlrState::d, "D" );
    }
    return res;
}

inline
std::vector< std::string >
selftest_suite_names ()
{
    return { "descent", "eckart-young", "projection", "gradient" };
}

// trials = 0 picks each suite's default count
inline
SuiteResult
run_selftest_suite ( std::string const &  name, std::size_t trials, std::uint64_t seed )
{
    if ( name == "descent" )
        return selftest_descent( trials ? trials : 50, seed );
    if ( name == "eckart-young" )
        return selftest_eckart_young( trials ? trials : 50, seed );
    if ( name == "projection" )
        return selftest_projection( trials ? trials : 200, seed );
    if ( name == "gradient" )
        return selftest_gradient( trials ? trials : 20, seed );
    throw validation_error( "selftest: unknown suite '" + name + "'" );
}

inline
std::string
summary_line ( SuiteResult const &  r )
{
    std::ostringstream  os;
    os << ( r.passed() ? "PASS " : "FAIL " ) << r.name << ": " << r.checks << " checks, " << r.failures << " failures";
    if ( ! r.passed() )
        os << " (first: " << r.first_failure << ")";
    return os.str();
}

} // namespace wlra
