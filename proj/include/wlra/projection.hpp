#pragma once
//
// Module      : wlra/projection
// Description : orthogonal projections onto a column space and its complement,
//               canonical angles between column spaces
//

#include <algorithm>
#include <cmath>
#include <vector>

#include "wlra/svd.hpp"

namespace wlra {

//
// Orthonormal basis of span(basis). Throws rank_deficient_error when
// σ_min ≤ rank_tolerance·σ_max.
//
inline
Matrix
orthonormal_basis ( Matrix const &  basis, char const *  who = "projection" )
{
    if ( basis.cols() == 0 )
        return Matrix( basis.rows(), 0 );

    if ( basis.cols() > basis.rows() )
        throw rank_deficient_error( std::string( who ) + ": basis has more columns than rows" );

    auto  f = svd( basis );
    if ( f.sigma.back() <= rank_tolerance * f.sigma.front() )
        throw rank_deficient_error( std::string( who ) + ": basis is not of full column rank" );

    return std::move( f.u );
}

// P_B(t) for an orthonormal q spanning B
inline
Matrix
project_with_basis ( Matrix const &  q, Matrix const &  target )
{
    if ( q.rows() != target.rows() )
        throw shape_error( "projection: basis has " + std::to_string( q.rows() ) + " rows, target " +
                           std::to_string( target.rows() ) );
    return q * transpose_times( q, target );
}

inline
Matrix
project_onto_colspace ( Matrix const &  basis, Matrix const &  target )
{
    if ( basis.rows() != target.rows() )
        throw shape_error( "project_onto_colspace: row counts differ" );
    return project_with_basis( orthonormal_basis( basis, "project_onto_colspace" ), target );
}

// P⊥_B(t) = t − P_B(t)
inline
Matrix
project_onto_complement ( Matrix const &  basis, Matrix const &  target )
{
    if ( basis.rows() != target.rows() )
        throw shape_error( "project_onto_complement: row counts differ" );
    return target - project_with_basis( orthonormal_basis( basis, "project_onto_complement" ), target );
}

// P_B as an explicit m×m matrix
inline
Matrix
projector ( Matrix const &  basis )
{
    auto  q = orthonormal_basis( basis, "projector" );
    return times_transpose( q, q );
}

//
// Sines of the canonical angles between span(b) and span(b_tilde),
// non-increasing. Computed as the singular values of P⊥_b·Q̃ which keeps
// small angles accurate.
//
inline
std::vector< double >
canonical_angle_sines ( Matrix const &  b, Matrix const &  b_tilde )
{
    if ( b.rows() != b_tilde.rows() )
        throw shape_error( "canonical_angle_sines: row counts differ" );
    if ( b.cols() != b_tilde.cols() )
        throw shape_error( "canonical_angle_sines: column counts differ" );

    auto  q  = orthonormal_basis( b, "canonical_angle_sines" );
    auto  qt = orthonormal_basis( b_tilde, "canonical_angle_sines" );

    auto  resid = qt - project_with_basis( q, qt );
    auto  s     = singular_values( resid );
    for ( auto &  x : s )
        x = std::clamp( x, 0.0, 1.0 );
    return s;
}

} // namespace wlra
