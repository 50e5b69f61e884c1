#pragma once
//
// Module      : wlra/wlr
// Description : alternating minimisation for weighted low-rank approximation
//               with a weighted leading column block
//
// Minimises
//
//     F(X1, C, B, D) = ‖(A1 − X1) ⊙ W1‖_F² + ‖A2 − X1·C − B·D‖_F²
//
// over X1 (m×k), C (k×(n−k)), B (m×(r−k)), D ((r−k)×(n−k)); the approximation
// is (X1  X1·C + B·D), of rank ≤ r by construction. One sweep updates the four
// blocks in the order X1 → C → B → D, each as an exact block minimiser, so the
// objective never increases and its decrease splits exactly into four squared
// norms (see DescentDecomposition).
//
// Weights above ~1e6 are unsupported: W1² enters the row systems and leaves
// too few significant digits in double precision.
//

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wlra/csv.hpp"
#include "wlra/random.hpp"
#include "wlra/solve.hpp"
#include "wlra/svd.hpp"

namespace wlra {

struct WlrProblem
{
    Matrix  a1;   // m×k
    Matrix  a2;   // m×(n−k)
    Matrix  w1;   // m×k, strictly positive
    idx_t   r = 0;

    idx_t m  () const noexcept { return a1.rows(); }
    idx_t k  () const noexcept { return a1.cols(); }
    idx_t nk () const noexcept { return a2.cols(); }
    idx_t n  () const noexcept { return a1.cols() + a2.cols(); }

    // checks every invariant; throws shape_error / validation_error / rank_deficient_error
    void validate () const
    {
        if ( a1.rows() != a2.rows() )
            throw shape_error( "wlr: a1 and a2 row counts differ" );
        if ( ! w1.same_shape( a1 ) )
            throw shape_error( "wlr: w1 must have the shape of a1 (" + detail::shape_str( a1 ) + "), got " +
                               detail::shape_str( w1 ) );
        for ( auto  w : w1.data() )
            if ( ! ( w > 0.0 ) )
                throw validation_error( "wlr: weights must be strictly positive" );
        if ( r < k() )
            throw validation_error( "wlr: requires r >= k (r = " + std::to_string( r ) + ", k = " + std::to_string( k() ) + ")" );
        if ( r > std::min( m(), n() ) )
            throw validation_error( "wlr: requires r <= min(m, n)" );
        if ( k() > 0 && numerical_rank( a1 ) < k() )
            throw rank_deficient_error( "wlr: a1 must have full column rank" );
    }

    static WlrProblem make ( Matrix a1, Matrix a2, Matrix w1, idx_t r )
    {
        WlrProblem  p{ std::move( a1 ), std::move( a2 ), std::move( w1 ), r };
        p.validate();
        return p;
    }

    static WlrProblem uniform ( Matrix a1, Matrix a2, double lambda, idx_t r )
    {
        Matrix  w( a1.rows(), a1.cols(), lambda );
        return make( std::move( a1 ), std::move( a2 ), std::move( w ), r );
    }

    Matrix a () const { return hcat( a1, a2 ); }
};

struct WlrState
{
    Matrix       x1;   // m×k
    Matrix       c;    // k×(n−k)
    Matrix       b;    // m×(r−k)
    Matrix       d;    // (r−k)×(n−k)
    std::size_t  p = 0;

    Matrix x2       () const { return x1 * c + b * d; }
    Matrix combined () const { return hcat( x1, x2() ); }
};

struct StoppingCriteria
{
    double       epsilon     = 1e-16;
    std::size_t  max_iter    = 2500;
    // record descent decompositions and gradient norms every sweep
    bool         diagnostics = false;
};

enum class StopReason { abs_error, rel_error, max_iter };

inline
std::string
to_string ( StopReason r )
{
    switch ( r )
    {
        case StopReason::abs_error : return "abs_error";
        case StopReason::rel_error : return "rel_error";
        case StopReason::max_iter  : return "max_iter";
    }
    return "unknown";
}

//
// Split of one sweep's decrease m_p − m_{p+1} into
//   d1 = ‖ΔX1 ⊙ W1‖² + ‖ΔX1·C_p‖²,   d2 = ‖X1'·(C_p − C')‖²,
//   d3 = ‖(B_p − B')·D_p‖²,           d4 = ‖B'·(D_p − D')‖²,
// where primes denote the new iterate.
//
struct DescentDecomposition
{
    double  d1   = 0.0;
    double  d2   = 0.0;
    double  d3   = 0.0;
    double  d4   = 0.0;
    double  m_p  = 0.0;
    double  m_p1 = 0.0;

    double sum      () const noexcept { return d1 + d2 + d3 + d4; }
    double decrease () const noexcept { return m_p - m_p1; }
};

// Frobenius norms of ∂F/∂X1, ∂F/∂C, ∂F/∂B, ∂F/∂D
struct StationarityResiduals
{
    double  x1 = 0.0;
    double  c  = 0.0;
    double  b  = 0.0;
    double  d  = 0.0;

    double max () const noexcept { return std::max( { x1, c, b, d } ); }
};

struct Gradients
{
    Matrix  x1;
    Matrix  c;
    Matrix  b;
    Matrix  d;
};

struct WlrReport
{
    WlrState                              final_state;
    // m_0, m_1, …, m_N
    std::vector< double >                 objective_trace;
    // Error_p = ‖(A_WLR)_{p+1} − (A_WLR)_p‖_F for p = 0 … N−1
    std::vector< double >                 error_trace;
    // filled when diagnostics are on: one per sweep
    std::vector< DescentDecomposition >   descent_traces;
    std::vector< StationarityResiduals >  residual_traces;
    StopReason                            stop_reason = StopReason::max_iter;
    StationarityResiduals                 stationarity_residuals;
    // sweeps in which a Gram matrix was singular and a minimum-norm solve was used
    std::vector< std::size_t >            fallback_sweeps;
    // Σ_p ‖B_{p+1}D_{p+1} − B_pD_p‖²  (bounded by 2·m_0)
    double                                bd_step_sum       = 0.0;
    // Σ_p √(m_p − m_{p+1})
    double                                sqrt_decrease_sum = 0.0;

    std::size_t iterations () const noexcept { return error_trace.size(); }
    Matrix      approximation () const { return final_state.combined(); }
};

namespace detail {

inline
void
check_state ( WlrProblem const &  prob, WlrState const &  st )
{
    const idx_t  m = prob.m(), k = prob.k(), nk = prob.nk(), q = prob.r - prob.k();

    auto  expect = [] ( Matrix const &  x, idx_t r, idx_t c, char const *  name )
    {
        if ( x.rows() != r || x.cols() != c )
            throw shape_error( std::string( "wlr state: " ) + name + " is " + shape_str( x ) + ", expected " +
                               std::to_string( r ) + "x" + std::to_string( c ) );
    };
    expect( st.x1, m, k, "x1" );
    expect( st.c, k, nk, "c" );
    expect( st.b, m, q, "b" );
    expect( st.d, q, nk, "d" );
}

// A2 − X1·C − B·D
inline
Matrix
residual ( WlrProblem const &  prob, Matrix const &  x1, Matrix const &  c, Matrix const &  b, Matrix const &  d )
{
    Matrix  res = prob.a2;
    res -= x1 * c;
    res -= b * d;
    return res;
}

} // namespace detail

inline
double
objective ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );

    double  f = 0.0;
    for ( idx_t  i = 0; i < prob.m(); ++i )
        for ( idx_t  j = 0; j < prob.k(); ++j )
        {
            const double  e = ( prob.a1( i, j ) - st.x1( i, j ) ) * prob.w1( i, j );
            f += e * e;
        }
    return f + frobenius_norm_squared( detail::residual( prob, st.x1, st.c, st.b, st.d ) );
}

//
// Row-wise exact minimiser over X1 at fixed (C, B, D):
//   (diag(W1(i,:)²) + C·Cᵀ) X1(i,:)ᵀ = E(i,:)ᵀ,   E = A1⊙W1⊙W1 + (A2 − B·D)·Cᵀ.
// Each row system is SPD (it dominates min(W1)²·I) and is solved by Cholesky.
//
inline
Matrix
update_x1 ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );

    const idx_t  m = prob.m();
    const idx_t  k = prob.k();

    Matrix  e   = times_transpose( prob.a2 - st.b * st.d, st.c );
    Matrix  cct = times_transpose( st.c, st.c );
    Matrix  x1( m, k );

    for ( idx_t  i = 0; i < m; ++i )
    {
        Matrix  sys = cct;
        Matrix  rhs( k, 1 );
        for ( idx_t  j = 0; j < k; ++j )
        {
            const double  w2 = prob.w1( i, j ) * prob.w1( i, j );
            sys( j, j ) += w2;
            rhs( j, 0 ) = prob.a1( i, j ) * w2 + e( i, j );
        }

        auto  sol = cholesky_solve( sys, std::move( rhs ) );
        if ( ! sol )
            throw internal_error( "wlr: row system " + std::to_string( i ) + " of the X1 update is not positive definite" );
        for ( idx_t  j = 0; j < k; ++j )
            x1( i, j ) = ( *sol )( j, 0 );
    }

    return x1;
}

// argmin_C F(X1, C, B, D) with X1 taken from st
inline
LeastSquaresSolution
update_c ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );
    return solve_least_squares( st.x1, prob.a2 - st.b * st.d );
}

// argmin_B F(X1, C, B, D) at fixed D
inline
LeastSquaresSolution
update_b ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );
    return solve_least_squares_right( st.d, prob.a2 - st.x1 * st.c );
}

// argmin_D F(X1, C, B, D) at fixed B
inline
LeastSquaresSolution
update_d ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );
    return solve_least_squares( st.b, prob.a2 - st.x1 * st.c );
}

struct SweepOutcome
{
    WlrState  state;
    bool      fallback = false;
};

// one full X1 → C → B → D sweep
inline
SweepOutcome
sweep ( WlrProblem const &  prob, WlrState const &  st )
{
    SweepOutcome  res{ st, false };
    auto &       nx = res.state;

    nx.x1 = update_x1( prob, nx );

    auto  c = update_c( prob, nx );
    nx.c         = std::move( c.x );
    res.fallback = c.fallback;

    if ( prob.r > prob.k() )
    {
        auto  b = update_b( prob, nx );
        nx.b          = std::move( b.x );
        res.fallback |= b.fallback;

        auto  d = update_d( prob, nx );
        nx.d          = std::move( d.x );
        res.fallback |= d.fallback;
    }

    nx.p = st.p + 1;
    return res;
}

inline
DescentDecomposition
descent_decomposition ( WlrProblem const &  prob, WlrState const &  st_p, WlrState const &  st_p1 )
{
    detail::check_state( prob, st_p );
    detail::check_state( prob, st_p1 );

    DescentDecomposition  dd;

    auto  dx = st_p.x1 - st_p1.x1;
    dd.d1 = frobenius_norm_squared( hadamard( dx, prob.w1 ) ) + frobenius_norm_squared( dx * st_p.c );
    dd.d2 = frobenius_norm_squared( st_p1.x1 * ( st_p.c - st_p1.c ) );
    dd.d3 = frobenius_norm_squared( ( st_p.b - st_p1.b ) * st_p.d );
    dd.d4 = frobenius_norm_squared( st_p1.b * ( st_p.d - st_p1.d ) );

    dd.m_p  = objective( prob, st_p );
    dd.m_p1 = objective( prob, st_p1 );
    return dd;
}

//
// ∂F/∂X1 = 2[(X1 − A1)⊙W1⊙W1 − R·Cᵀ],  ∂F/∂C = −2·X1ᵀR,
// ∂F/∂B  = −2·R·Dᵀ,                    ∂F/∂D = −2·BᵀR,     R = A2 − X1·C − B·D
//
inline
Gradients
gradients ( WlrProblem const &  prob, WlrState const &  st )
{
    detail::check_state( prob, st );

    auto  res = detail::residual( prob, st.x1, st.c, st.b, st.d );

    Gradients  g;
    g.x1 = hadamard( hadamard( st.x1 - prob.a1, prob.w1 ), prob.w1 ) - times_transpose( res, st.c );
    g.x1 *= 2.0;
    g.c = transpose_times( st.x1, res ) * -2.0;
    g.b = times_transpose( res, st.d ) * -2.0;
    g.d = transpose_times( st.b, res ) * -2.0;
    return g;
}

inline
StationarityResiduals
stationarity_residuals ( WlrProblem const &  prob, WlrState const &  st )
{
    auto  g = gradients( prob, st );
    return { frobenius_norm( g.x1 ), frobenius_norm( g.c ), frobenius_norm( g.b ), frobenius_norm( g.d ) };
}

//
// Default start: X1 and D standard normal, B and C zero. A draw in which X1 or
// D is numerically rank deficient is redrawn with the next seed, at most five
// times.
//
inline
WlrState
default_init ( WlrProblem const &  prob, std::uint64_t seed )
{
    const idx_t  q = prob.r - prob.k();

    for ( int  attempt = 0; attempt <= 5; ++attempt )
    {
        Rng       rng( seed + std::uint64_t( attempt ) );
        WlrState  st;
        st.x1 = random_normal( prob.m(), prob.k(), rng );
        st.d  = random_normal( q, prob.nk(), rng );
        st.b  = Matrix( prob.m(), q );
        st.c  = Matrix( prob.k(), prob.nk() );

        const bool  x1_ok = prob.k() == 0 || numerical_rank( st.x1 ) == prob.k();
        const bool  d_ok  = q == 0 || numerical_rank( st.d ) == q;
        if ( x1_ok && d_ok )
            return st;
    }

    throw rank_deficient_error( "wlr: random initialisation stayed rank deficient after 5 redraws" );
}

//
// State reproducing a given approximation (X1  X2): C = argmin ‖X2 − X1·C‖,
// B·D the best rank-(r−k) factorisation of what remains, split as U·Σ and Vᵀ.
//
inline
WlrState
factor_state ( Matrix const &  x1, Matrix const &  x2, idx_t r )
{
    if ( x1.rows() != x2.rows() )
        throw shape_error( "wlr: x1 and x2 row counts differ" );
    if ( r < x1.cols() || r > x1.cols() + x2.cols() )
        throw validation_error( "wlr: requires k <= r <= n" );

    const idx_t  q = r - x1.cols();
    WlrState     st;
    st.x1 = x1;
    st.c  = solve_least_squares( x1, x2 ).x;

    auto  f = svd( x2 - x1 * st.c );
    st.b = Matrix( x1.rows(), q );
    st.d = Matrix( q, x2.cols() );
    for ( idx_t  l = 0; l < std::min< idx_t >( q, f.sigma.size() ); ++l )
    {
        for ( idx_t  i = 0; i < st.b.rows(); ++i )
            st.b( i, l ) = f.u( i, l ) * f.sigma[l];
        for ( idx_t  j = 0; j < st.d.cols(); ++j )
            st.d( l, j ) = f.v( j, l );
    }
    return st;
}

// called after every sweep with the new state, its objective and Error_p
using WlrObserver = std::function< void ( WlrState const &, double objective, double error ) >;

inline
WlrReport
solve ( WlrProblem const &  prob, WlrState const &  init, StoppingCriteria const &  stop, WlrObserver const &  observer = {} )
{
    prob.validate();
    detail::check_state( prob, init );
    if ( ! ( stop.epsilon > 0.0 ) )
        throw validation_error( "wlr: requires epsilon > 0" );
    if ( stop.max_iter < 1 )
        throw validation_error( "wlr: requires max_iter >= 1" );

    WlrReport  rep;
    WlrState   st     = init;
    double     m_prev = objective( prob, st );
    Matrix     a_prev = st.combined();
    Matrix     bd_prev = st.b * st.d;

    rep.objective_trace.push_back( m_prev );

    for ( std::size_t  it = 1; it <= stop.max_iter; ++it )
    {
        auto    next   = sweep( prob, st );
        double  m_next = objective( prob, next.state );

        if ( next.fallback )
            rep.fallback_sweeps.push_back( it );

        if ( stop.diagnostics )
        {
            rep.descent_traces.push_back( descent_decomposition( prob, st, next.state ) );
            rep.residual_traces.push_back( stationarity_residuals( prob, next.state ) );
        }

        Matrix        a_next  = next.state.combined();
        Matrix        bd_next = next.state.b * next.state.d;
        const double  err     = frobenius_norm( a_next - a_prev );
        const double  a_norm  = frobenius_norm( a_prev );

        rep.error_trace.push_back( err );
        rep.objective_trace.push_back( m_next );
        rep.bd_step_sum       += frobenius_norm_squared( bd_next - bd_prev );
        rep.sqrt_decrease_sum += std::sqrt( std::max( 0.0, m_prev - m_next ) );

        st      = std::move( next.state );
        m_prev  = m_next;
        a_prev  = std::move( a_next );
        bd_prev = std::move( bd_next );

        if ( observer )
            observer( st, m_next, err );

        if ( err < stop.epsilon )
        {
            rep.stop_reason = StopReason::abs_error;
            break;
        }
        if ( a_norm > 0.0 && err / a_norm < stop.epsilon )
        {
            rep.stop_reason = StopReason::rel_error;
            break;
        }
        rep.stop_reason = StopReason::max_iter;
    }

    rep.stationarity_residuals = stationarity_residuals( prob, st );
    rep.final_state            = std::move( st );
    return rep;
}

inline
WlrReport
solve ( WlrProblem const &  prob, std::uint64_t seed, StoppingCriteria const &  stop )
{
    prob.validate();
    return solve( prob, default_init( prob, seed ), stop );
}

//
// Per-sweep trace: p, m_p, Error_p, d1..d4 of sweep p → p+1 and the four
// gradient norms at iterate p+1. Requires a run with diagnostics enabled.
//
inline
std::string
report_csv ( WlrReport const &  rep )
{
    if ( rep.descent_traces.size() != rep.iterations() )
        throw validation_error( "wlr: trace CSV needs a run with diagnostics enabled" );

    CsvWriter  csv( { "p", "m_p", "error_p", "d1", "d2", "d3", "d4", "grad_x1", "grad_c", "grad_b", "grad_d" } );
    for ( std::size_t  p = 0; p < rep.iterations(); ++p )
    {
        auto const &  dd = rep.descent_traces[p];
        auto const &  rs = rep.residual_traces[p];
        csv.add_row( { (long long)( p ), rep.objective_trace[p], rep.error_trace[p],
                       dd.d1, dd.d2, dd.d3, dd.d4, rs.x1, rs.c, rs.b, rs.d } );
    }
    return csv.str();
}

} // namespace wlra
