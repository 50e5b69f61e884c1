#pragma once
//
// Module      : wlra/qr
// Description : thin Householder QR
//

#include <cmath>
#include <vector>

#include "wlra/matrix.hpp"

namespace wlra {

// a = q·r, q is m×p with orthonormal columns, r is p×n upper triangular with
// non-negative diagonal, p = min(m, n)
struct QrFactors
{
    Matrix  q;
    Matrix  r;
};

inline
QrFactors
qr ( Matrix const &  a )
{
    const idx_t  m = a.rows();
    const idx_t  n = a.cols();
    const idx_t  p = std::min( m, n );

    Matrix                              r = a;
    std::vector< std::vector< double > > refl( p );

    for ( idx_t  j = 0; j < p; ++j )
    {
        auto &  h = refl[j];
        h.assign( m - j, 0.0 );

        double  nrm = 0.0;
        for ( idx_t  i = j; i < m; ++i )
            nrm += r( i, j ) * r( i, j );
        nrm = std::sqrt( nrm );

        if ( nrm == 0.0 )
            continue;

        const double  alpha = r( j, j ) > 0.0 ? -nrm : nrm;
        for ( idx_t  i = j; i < m; ++i )
            h[i - j] = r( i, j );
        h[0] -= alpha;

        double  hn = 0.0;
        for ( auto  x : h ) hn += x * x;
        if ( hn == 0.0 )
        {
            h.assign( m - j, 0.0 );
            continue;
        }
        hn = std::sqrt( hn );
        for ( auto &  x : h ) x /= hn;

        // r ← (I − 2hhᵀ) r on rows j..m
        for ( idx_t  c = j; c < n; ++c )
        {
            double  s = 0.0;
            for ( idx_t  i = j; i < m; ++i ) s += h[i - j] * r( i, c );
            s *= 2.0;
            for ( idx_t  i = j; i < m; ++i ) r( i, c ) -= s * h[i - j];
        }
        for ( idx_t  i = j + 1; i < m; ++i )
            r( i, j ) = 0.0;
    }

    // q = H_0 H_1 … H_{p-1} applied to the leading p columns of I
    Matrix  q( m, p );
    for ( idx_t  j = 0; j < p; ++j )
        q( j, j ) = 1.0;

    for ( idx_t  jj = p; jj-- > 0; )
    {
        auto const &  h = refl[jj];
        for ( idx_t  c = 0; c < p; ++c )
        {
            double  s = 0.0;
            for ( idx_t  i = jj; i < m; ++i ) s += h[i - jj] * q( i, c );
            s *= 2.0;
            if ( s == 0.0 ) continue;
            for ( idx_t  i = jj; i < m; ++i ) q( i, c ) -= s * h[i - jj];
        }
    }

    QrFactors  f{ std::move( q ), Matrix( p, n ) };
    for ( idx_t  i = 0; i < p; ++i )
        for ( idx_t  c = i; c < n; ++c )
            f.r( i, c ) = r( i, c );

    for ( idx_t  i = 0; i < p; ++i )
        if ( f.r( i, i ) < 0.0 )
        {
            for ( idx_t  c = 0; c < n; ++c ) f.r( i, c ) = -f.r( i, c );
            for ( idx_t  l = 0; l < m; ++l ) f.q( l, i ) = -f.q( l, i );
        }

    return f;
}

} // namespace wlra
