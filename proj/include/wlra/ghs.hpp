#pragma once
//
// Module      : wlra/ghs
// Description : closed-form constrained low-rank approximation (A1 kept exactly),
//               the uniform-weight penalized closed form and the rank-penalized limit
//

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wlra/projection.hpp"
#include "wlra/svd.hpp"

namespace wlra {

//
// Solution of   min ‖(A1 A2) − (X1 X2)‖_F   s.t. rank(X1 X2) ≤ r, X1 = A1,
// given by X2 = P_{A1}(A2) + H_{r−k}(P⊥_{A1}(A2)).
//
struct GhsSolution
{
    Matrix                 x1;
    Matrix                 x2;
    // σ_{r−k} − σ_{r−k+1} of P⊥_{A1}(A2), with σ_0 = ∞ and σ_{s+1} = 0
    double                 spectral_gap = 0.0;
    bool                   unique       = true;
    // singular values of P⊥_{A1}(A2)
    std::vector< double >  projected_sigma;

    Matrix combined () const { return hcat( x1, x2 ); }
};

struct PenalizedSolution
{
    idx_t        r_star = 0;
    GhsSolution  solution;
    double       tau = 0.0;
    // τ coincides with some σ_i² up to 1e-12 relative
    bool         boundary_tie = false;
};

struct RankSelection
{
    idx_t  rank         = 0;
    bool   boundary_tie = false;
};

namespace detail {

inline
void
check_ghs_inputs ( Matrix const &  a1, Matrix const &  a2 )
{
    if ( a1.rows() != a2.rows() )
        throw shape_error( "ghs: a1 has " + std::to_string( a1.rows() ) + " rows, a2 has " + std::to_string( a2.rows() ) );
}

// pieces shared by the fixed-rank and the rank-penalized solvers
struct GhsParts
{
    Matrix      projected;    // P_{A1}(A2)
    SvdFactors  complement;   // SVD of P⊥_{A1}(A2)
};

inline
GhsParts
ghs_parts ( Matrix const &  a1, Matrix const &  a2 )
{
    auto  q    = orthonormal_basis( a1, "ghs: a1" );
    auto  proj = project_with_basis( q, a2 );
    auto  perp = a2 - proj;
    return { std::move( proj ), svd( perp ) };
}

inline
GhsSolution
ghs_assemble ( Matrix const &  a1, GhsParts const &  parts, idx_t rk )
{
    GhsSolution  sol;
    sol.x1              = a1;
    sol.x2              = parts.projected + hard_threshold( parts.complement, rk ).approx;
    sol.projected_sigma = parts.complement.sigma;

    auto const &  s  = sol.projected_sigma;
    const double  s1 = s.empty() ? 0.0 : s.front();
    const double  hi = rk == 0 ? std::numeric_limits< double >::infinity() : s[rk - 1];
    const double  lo = rk < s.size() ? s[rk] : 0.0;

    sol.spectral_gap = hi - lo;
    // a zero gap between two vanishing singular values still leaves H unique
    sol.unique = sol.spectral_gap > tie_tolerance * s1 || hi <= rank_tolerance * s1;
    return sol;
}

} // namespace detail

inline
GhsSolution
solve_ghs ( Matrix const &  a1, Matrix const &  a2, idx_t r )
{
    detail::check_ghs_inputs( a1, a2 );

    const idx_t  k = a1.cols();
    const idx_t  m = a1.rows();
    const idx_t  n = k + a2.cols();

    if ( r < k )
        throw validation_error( "ghs: requires r >= k (r = " + std::to_string( r ) + ", k = " + std::to_string( k ) + ")" );
    if ( r > std::min( m, n ) )
        throw validation_error( "ghs: requires r <= min(m, n) (r = " + std::to_string( r ) + ", min(m, n) = " +
                                std::to_string( std::min( m, n ) ) + ")" );

    return detail::ghs_assemble( a1, detail::ghs_parts( a1, a2 ), r - k );
}

// ‖A2 − X2‖_F², the constrained objective
inline
double
ghs_objective ( Matrix const &  a2, GhsSolution const &  sol )
{
    return frobenius_norm_squared( a2 - sol.x2 );
}

//
// Closed form of  min λ²‖A1 − X1‖² + ‖A2 − X2‖²  s.t. rank(X1 X2) ≤ r:
// H_r((λA1 A2)) with its first block scaled back by 1/λ.
//
inline
std::pair< Matrix, Matrix >
solve_uniform_penalized ( Matrix const &  a1, Matrix const &  a2, double lambda, idx_t r )
{
    detail::check_ghs_inputs( a1, a2 );

    if ( ! ( lambda > 0.0 ) || ! std::isfinite( lambda ) )
        throw validation_error( "uniform_penalized: requires lambda > 0" );

    const idx_t  k = a1.cols();
    if ( r > std::min( a1.rows(), k + a2.cols() ) )
        throw validation_error( "uniform_penalized: requires r <= min(m, n)" );

    auto  h = hard_threshold( hcat( a1 * lambda, a2 ), r );
    auto  [ x1, x2 ] = split_columns( h, k );
    x1 *= 1.0 / lambda;
    return { std::move( x1 ), std::move( x2 ) };
}

//
// r* with σ_{r*+1}² ≤ τ < σ_{r*}² (σ_0 = ∞, σ_{s+1} = 0): the number of
// singular values whose square exceeds τ. Equality attaches τ to the
// smaller rank.
//
inline
RankSelection
select_rank_from_tau ( std::vector< double > const &  sigmas, double tau )
{
    if ( ! ( tau > 0.0 ) || ! std::isfinite( tau ) )
        throw validation_error( "select_rank_from_tau: requires tau > 0" );

    RankSelection  sel;
    for ( idx_t  i = 0; i < sigmas.size(); ++i )
    {
        const double  s = sigmas[i];
        if ( ! ( s >= 0.0 ) || ( i > 0 && s > sigmas[i - 1] ) )
            throw validation_error( "select_rank_from_tau: sigmas must be non-negative and non-increasing" );

        const double  s2 = s * s;
        if ( s2 > tau )
            ++sel.rank;
        if ( s2 > 0.0 && std::abs( tau - s2 ) <= 1e-12 * s2 )
            sel.boundary_tie = true;
    }
    return sel;
}

inline
PenalizedSolution
solve_rank_penalized_limit ( Matrix const &  a1, Matrix const &  a2, double tau )
{
    detail::check_ghs_inputs( a1, a2 );

    if ( ! ( tau > 0.0 ) || ! std::isfinite( tau ) )
        throw validation_error( "rank_penalized_limit: requires tau > 0" );

    auto  parts = detail::ghs_parts( a1, a2 );
    auto  sel   = select_rank_from_tau( parts.complement.sigma, tau );

    PenalizedSolution  res;
    res.r_star       = sel.rank;
    res.tau          = tau;
    res.boundary_tie = sel.boundary_tie;
    res.solution     = detail::ghs_assemble( a1, parts, sel.rank );
    return res;
}

} // namespace wlra
