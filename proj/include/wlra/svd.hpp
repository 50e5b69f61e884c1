#pragma once
//
// Module      : wlra/svd
// Description : one-sided Jacobi SVD, numerical rank and hard thresholding H_r
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "wlra/matrix.hpp"

namespace wlra {

// relative threshold on σ_i/σ_1 below which a singular value counts as zero
inline constexpr double rank_tolerance = 1e-12;

// relative gap σ_r − σ_{r+1} ≤ tie_tolerance·σ_1 makes a truncation non-unique
inline constexpr double tie_tolerance = 1e-10;

// sweep budget of the Jacobi kernel
inline constexpr int svd_max_sweeps = 60;

//
// Thin SVD a = u·diag(sigma)·vᵀ with q = min(m,n): u is m×q, v is n×q,
// sigma non-increasing. Each column of u has its largest-magnitude entry
// non-negative (first such row on ties); v is flipped to match.
//
struct SvdFactors
{
    Matrix                 u;
    std::vector< double >  sigma;
    Matrix                 v;

    Matrix reconstruct () const
    {
        Matrix  us = u;
        for ( idx_t  i = 0; i < us.rows(); ++i )
            for ( idx_t  j = 0; j < sigma.size(); ++j )
                us( i, j ) *= sigma[j];
        return times_transpose( us, v );
    }
};

namespace detail {

// column-major work storage for the Jacobi rotations
struct ColumnSet
{
    idx_t                  len   = 0;
    idx_t                  count = 0;
    std::vector< double >  data;

    double *        col ( idx_t j )       { return data.data() + j * len; }
    double const *  col ( idx_t j ) const { return data.data() + j * len; }
};

inline
double
dot ( double const *  x, double const *  y, idx_t n ) noexcept
{
    double  s = 0.0;
    for ( idx_t i = 0; i < n; ++i )
        s += x[i] * y[i];
    return s;
}

inline
void
rotate ( double *  x, double *  y, idx_t n, double c, double s ) noexcept
{
    for ( idx_t i = 0; i < n; ++i )
    {
        const double  xi = x[i];
        const double  yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

//
// Hestenes one-sided Jacobi on a tall matrix (m >= n): orthogonalises the
// columns of w by plane rotations accumulated into v. On return column j of
// w equals σ_j·u_j.
//
inline
void
jacobi_orthogonalize ( ColumnSet &  w, ColumnSet &  v )
{
    const idx_t   n   = w.count;
    const double  tol = std::max< double >( 1, w.len ) * std::numeric_limits< double >::epsilon();

    // squared column norms, refreshed every sweep and updated in between
    std::vector< double >  norm2( n );

    for ( int  sweep = 0; sweep < svd_max_sweeps; ++sweep )
    {
        bool  rotated = false;

        for ( idx_t  j = 0; j < n; ++j )
            norm2[j] = dot( w.col( j ), w.col( j ), w.len );

        for ( idx_t  p = 0; p + 1 < n; ++p )
        {
            for ( idx_t  q = p + 1; q < n; ++q )
            {
                double *      wp    = w.col( p );
                double *      wq    = w.col( q );
                const double  alpha = norm2[p];
                const double  beta  = norm2[q];
                const double  gamma = dot( wp, wq, w.len );

                if ( alpha == 0.0 || beta == 0.0 )
                    continue;
                if ( std::abs( gamma ) <= tol * std::sqrt( alpha ) * std::sqrt( beta ) )
                    continue;

                const double  zeta = ( beta - alpha ) / ( 2.0 * gamma );
                const double  t    = std::copysign( 1.0, zeta ) / ( std::abs( zeta ) + std::sqrt( 1.0 + zeta * zeta ) );
                const double  c    = 1.0 / std::sqrt( 1.0 + t * t );
                const double  s    = c * t;

                rotate( wp, wq, w.len, c, s );
                rotate( v.col( p ), v.col( q ), v.len, c, s );
                // recompute where the update cancels, as happens for columns of
                // rank-deficient inputs that shrink to rounding noise
                norm2[p] = alpha - t * gamma;
                norm2[q] = beta + t * gamma;
                if ( norm2[p] < 0.1 * alpha )
                    norm2[p] = dot( wp, wp, w.len );
                if ( norm2[q] < 0.1 * beta )
                    norm2[q] = dot( wq, wq, w.len );
                rotated  = true;
            }
        }

        if ( ! rotated )
            return;
    }

    throw convergence_error( "svd: Jacobi kernel did not converge within " + std::to_string( svd_max_sweeps ) + " sweeps" );
}

// Gram-Schmidt completion of the columns flagged in <missing> against the
// remaining orthonormal columns, using unit vectors as candidates.
inline
void
complete_orthonormal ( ColumnSet &  u, std::vector< bool > const &  missing )
{
    const idx_t  m = u.len;
    idx_t        e = 0;

    for ( idx_t  j = 0; j < u.count; ++j )
    {
        if ( ! missing[j] )
            continue;

        double *  uj = u.col( j );
        for ( ; e < m; ++e )
        {
            std::fill( uj, uj + m, 0.0 );
            uj[e] = 1.0;

            for ( int  pass = 0; pass < 2; ++pass )
                for ( idx_t  l = 0; l < u.count; ++l )
                {
                    if ( l == j || ( missing[l] && l > j ) )
                        continue;
                    const double  h = dot( u.col( l ), uj, m );
                    for ( idx_t i = 0; i < m; ++i )
                        uj[i] -= h * u.col( l )[i];
                }

            const double  nrm = std::sqrt( dot( uj, uj, m ) );
            if ( nrm > 0.5 )
            {
                for ( idx_t i = 0; i < m; ++i )
                    uj[i] /= nrm;
                ++e;
                break;
            }
        }

        if ( e > m )
            throw internal_error( "svd: cannot complete orthonormal basis" );
    }
}

// SVD of a tall (rows >= cols) matrix
inline
SvdFactors
svd_tall ( Matrix const &  a )
{
    const idx_t  m = a.rows();
    const idx_t  n = a.cols();

    ColumnSet  w{ m, n, std::vector< double >( m * n ) };
    ColumnSet  v{ n, n, std::vector< double >( n * n, 0.0 ) };

    for ( idx_t  i = 0; i < m; ++i )
        for ( idx_t  j = 0; j < n; ++j )
            w.col( j )[i] = a( i, j );
    for ( idx_t  j = 0; j < n; ++j )
        v.col( j )[j] = 1.0;

    jacobi_orthogonalize( w, v );

    std::vector< double >  norms( n );
    for ( idx_t  j = 0; j < n; ++j )
        norms[j] = std::sqrt( dot( w.col( j ), w.col( j ), m ) );

    std::vector< idx_t >  order( n );
    std::iota( order.begin(), order.end(), idx_t( 0 ) );
    std::stable_sort( order.begin(), order.end(), [&] ( idx_t x, idx_t y ) { return norms[x] > norms[y]; } );

    ColumnSet              u{ m, n, std::vector< double >( m * n, 0.0 ) };
    ColumnSet              vs{ n, n, std::vector< double >( n * n ) };
    std::vector< double >  sigma( n );
    std::vector< bool >    missing( n, false );

    for ( idx_t  j = 0; j < n; ++j )
    {
        const idx_t  src = order[j];
        sigma[j] = norms[src];
        std::copy_n( v.col( src ), n, vs.col( j ) );
        if ( sigma[j] > 0.0 )
        {
            for ( idx_t  i = 0; i < m; ++i )
                u.col( j )[i] = w.col( src )[i] / sigma[j];
        }
        else
            missing[j] = true;
    }

    if ( std::find( missing.begin(), missing.end(), true ) != missing.end() )
        complete_orthonormal( u, missing );

    SvdFactors  f{ Matrix( m, n ), std::move( sigma ), Matrix( n, n ) };
    for ( idx_t  j = 0; j < n; ++j )
    {
        for ( idx_t  i = 0; i < m; ++i ) f.u( i, j ) = u.col( j )[i];
        for ( idx_t  i = 0; i < n; ++i ) f.v( i, j ) = vs.col( j )[i];
    }
    return f;
}

inline
void
normalize_signs ( SvdFactors &  f )
{
    for ( idx_t  j = 0; j < f.u.cols(); ++j )
    {
        idx_t   imax = 0;
        double  amax = -1.0;
        for ( idx_t  i = 0; i < f.u.rows(); ++i )
            if ( std::abs( f.u( i, j ) ) > amax )
            {
                amax = std::abs( f.u( i, j ) );
                imax = i;
            }
        if ( f.u.rows() > 0 && f.u( imax, j ) < 0.0 )
        {
            for ( idx_t  i = 0; i < f.u.rows(); ++i ) f.u( i, j ) = -f.u( i, j );
            for ( idx_t  i = 0; i < f.v.rows(); ++i ) f.v( i, j ) = -f.v( i, j );
        }
    }
}

} // namespace detail

//
// Thin singular value decomposition by one-sided Jacobi rotations.
// Deterministic for a fixed input; throws convergence_error when the sweep
// budget runs out.
//
inline
SvdFactors
svd ( Matrix const &  a )
{
    SvdFactors  f;

    if ( a.rows() >= a.cols() )
        f = detail::svd_tall( a );
    else
    {
        auto  ft = detail::svd_tall( transpose( a ) );
        f = SvdFactors{ std::move( ft.v ), std::move( ft.sigma ), std::move( ft.u ) };
    }

    detail::normalize_signs( f );
    return f;
}

inline
std::vector< double >
singular_values ( Matrix const &  a )
{
    return svd( a ).sigma;
}

// number of σ_i > rank_tolerance·σ_1
inline
idx_t
numerical_rank ( std::vector< double > const &  sigma )
{
    if ( sigma.empty() || sigma.front() == 0.0 )
        return 0;
    const double  thr = rank_tolerance * sigma.front();
    return idx_t( std::count_if( sigma.begin(), sigma.end(), [thr] ( double s ) { return s > thr; } ) );
}

inline
idx_t
numerical_rank ( Matrix const &  a )
{
    return numerical_rank( singular_values( a ) );
}

struct ThresholdResult
{
    Matrix  approx;
    // σ_r and σ_{r+1} coincide, so another rank-r truncation is equally optimal
    bool    non_unique = false;
};

// H_r of an already factored matrix
inline
ThresholdResult
hard_threshold ( SvdFactors const &  f, idx_t r )
{
    const idx_t  q = f.sigma.size();
    if ( r > q )
        throw validation_error( "hard_threshold: rank " + std::to_string( r ) + " exceeds min(rows, cols) = " + std::to_string( q ) );

    Matrix  us( f.u.rows(), r );
    Matrix  vr( f.v.rows(), r );
    for ( idx_t  i = 0; i < f.u.rows(); ++i )
        for ( idx_t  j = 0; j < r; ++j )
            us( i, j ) = f.u( i, j ) * f.sigma[j];
    for ( idx_t  i = 0; i < f.v.rows(); ++i )
        for ( idx_t  j = 0; j < r; ++j )
            vr( i, j ) = f.v( i, j );

    ThresholdResult  res{ times_transpose( us, vr ), false };

    if ( r > 0 && r < q )
    {
        const double  s1 = f.sigma.front();
        res.non_unique = f.sigma[r - 1] > rank_tolerance * s1 &&
                         f.sigma[r - 1] - f.sigma[r] <= tie_tolerance * s1;
    }
    return res;
}

//
// H_r(a) = U Σ_r Vᵀ, the best rank-r approximation in Frobenius norm.
// Requires 0 <= r <= min(rows, cols).
//
inline
Matrix
hard_threshold ( Matrix const &  a, idx_t r )
{
    if ( r > std::min( a.rows(), a.cols() ) )
        throw validation_error( "hard_threshold: rank " + std::to_string( r ) + " exceeds min(rows, cols) = " +
                                std::to_string( std::min( a.rows(), a.cols() ) ) );
    return hard_threshold( svd( a ), r ).approx;
}

inline
ThresholdResult
hard_threshold_flagged ( Matrix const &  a, idx_t r )
{
    if ( r > std::min( a.rows(), a.cols() ) )
        throw validation_error( "hard_threshold: rank " + std::to_string( r ) + " exceeds min(rows, cols) = " +
                                std::to_string( std::min( a.rows(), a.cols() ) ) );
    return hard_threshold( svd( a ), r );
}

// Σ_{i>r} σ_i², the squared Frobenius error of H_r
inline
double
tail_energy ( std::vector< double > const &  sigma, idx_t r )
{
    double  s = 0.0;
    for ( idx_t  i = r; i < sigma.size(); ++i )
        s += sigma[i] * sigma[i];
    return s;
}

} // namespace wlra
