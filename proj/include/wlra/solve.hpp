#pragma once
//
// Module      : wlra/solve
// Description : Cholesky solves and least squares with a minimum-norm fallback
//

#include <cmath>
#include <optional>

#include "wlra/svd.hpp"

namespace wlra {

// pivot ratio below which a Gram matrix is treated as singular
inline constexpr double gram_pivot_tolerance = 1e-13;

//
// Solves s·x = rhs for symmetric positive definite s (n×n) in place of rhs.
// Returns nullopt if a pivot drops below gram_pivot_tolerance·max(diag s).
//
inline
std::optional< Matrix >
cholesky_solve ( Matrix const &  s, Matrix rhs )
{
    const idx_t  n = s.rows();
    if ( s.cols() != n || rhs.rows() != n )
        throw shape_error( "cholesky_solve: system is " + detail::shape_str( s ) + ", rhs " + detail::shape_str( rhs ) );

    double  dmax = 0.0;
    for ( idx_t  i = 0; i < n; ++i )
        dmax = std::max( dmax, s( i, i ) );

    Matrix  l( n, n );
    for ( idx_t  j = 0; j < n; ++j )
    {
        double  d = s( j, j );
        for ( idx_t  p = 0; p < j; ++p )
            d -= l( j, p ) * l( j, p );
        if ( ! ( d > gram_pivot_tolerance * dmax ) )
            return std::nullopt;
        const double  ljj = std::sqrt( d );
        l( j, j ) = ljj;
        for ( idx_t  i = j + 1; i < n; ++i )
        {
            double  v = s( i, j );
            for ( idx_t  p = 0; p < j; ++p )
                v -= l( i, p ) * l( j, p );
            l( i, j ) = v / ljj;
        }
    }

    for ( idx_t  c = 0; c < rhs.cols(); ++c )
    {
        for ( idx_t  i = 0; i < n; ++i )
        {
            double  v = rhs( i, c );
            for ( idx_t  p = 0; p < i; ++p )
                v -= l( i, p ) * rhs( p, c );
            rhs( i, c ) = v / l( i, i );
        }
        for ( idx_t  i = n; i-- > 0; )
        {
            double  v = rhs( i, c );
            for ( idx_t  p = i + 1; p < n; ++p )
                v -= l( p, i ) * rhs( p, c );
            rhs( i, c ) = v / l( i, i );
        }
    }

    return rhs;
}

// minimum-norm solution of min ‖a·x − b‖_F via the pseudo-inverse
inline
Matrix
least_squares_min_norm ( Matrix const &  a, Matrix const &  b )
{
    if ( a.rows() != b.rows() )
        throw shape_error( "least_squares_min_norm: row counts differ" );

    if ( a.cols() == 0 || a.rows() == 0 )
        return Matrix( a.cols(), b.cols() );

    auto         f   = svd( a );
    const idx_t  rk  = numerical_rank( f.sigma );
    auto         utb = transpose_times( f.u, b );

    for ( idx_t  i = 0; i < utb.rows(); ++i )
        for ( idx_t  c = 0; c < utb.cols(); ++c )
            utb( i, c ) = i < rk ? utb( i, c ) / f.sigma[i] : 0.0;

    return f.v * utb;
}

struct LeastSquaresSolution
{
    Matrix  x;
    // normal equations were singular, x is the minimum-norm solution instead
    bool    fallback = false;
};

//
// argmin_x ‖a·x − b‖_F by the normal equations (aᵀa) x = aᵀb, falling back
// to the minimum-norm pseudo-inverse solution when aᵀa is numerically singular.
//
inline
LeastSquaresSolution
solve_least_squares ( Matrix const &  a, Matrix const &  b )
{
    if ( a.rows() != b.rows() )
        throw shape_error( "solve_least_squares: row counts differ, " + detail::shape_str( a ) + " vs " + detail::shape_str( b ) );

    if ( a.cols() == 0 )
        return { Matrix( 0, b.cols() ), false };

    if ( auto  x = cholesky_solve( transpose_times( a, a ), transpose_times( a, b ) ) )
        return { std::move( *x ), false };

    return { least_squares_min_norm( a, b ), true };
}

// argmin_x ‖x·a − b‖_F, the row-space counterpart
inline
LeastSquaresSolution
solve_least_squares_right ( Matrix const &  a, Matrix const &  b )
{
    if ( a.cols() != b.cols() )
        throw shape_error( "solve_least_squares_right: column counts differ, " + detail::shape_str( a ) + " vs " + detail::shape_str( b ) );

    auto  s = solve_least_squares( transpose( a ), transpose( b ) );
    return { transpose( s.x ), s.fallback };
}

} // namespace wlra
