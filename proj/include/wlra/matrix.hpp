#pragma once
//
// Module      : wlra/matrix
// Description : dense row-major real matrix and the elementwise/BLAS-like kernels on it
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wlra/error.hpp"

namespace wlra {

using idx_t = std::size_t;

//
// Dense real matrix, row-major storage. Zero-sized dimensions are allowed so
// that empty factor blocks (k = 0 or k = r) have a representation.
//
class Matrix
{
public:
    Matrix () = default;

    Matrix ( idx_t rows, idx_t cols, double fill = 0.0 )
        : _rows( rows ), _cols( cols ), _data( rows * cols, fill )
    {
        if ( ! std::isfinite( fill ) )
            throw validation_error( "matrix entries must be finite" );
    }

    Matrix ( idx_t rows, idx_t cols, std::vector< double > data )
        : _rows( rows ), _cols( cols ), _data( std::move( data ) )
    {
        if ( _data.size() != _rows * _cols )
            throw shape_error( "matrix: entry count " + std::to_string( _data.size() ) +
                               " does not match " + std::to_string( rows ) + "x" + std::to_string( cols ) );
        check_finite();
    }

    Matrix ( std::initializer_list< std::initializer_list< double > > rows )
        : _rows( rows.size() ), _cols( rows.size() == 0 ? 0 : rows.begin()->size() )
    {
        _data.reserve( _rows * _cols );
        for ( auto const &  r : rows )
        {
            if ( r.size() != _cols )
                throw shape_error( "matrix: ragged initializer list" );
            _data.insert( _data.end(), r.begin(), r.end() );
        }
        check_finite();
    }

    static Matrix zeros ( idx_t rows, idx_t cols ) { return Matrix( rows, cols, 0.0 ); }
    static Matrix ones  ( idx_t rows, idx_t cols ) { return Matrix( rows, cols, 1.0 ); }

    static Matrix identity ( idx_t n )
    {
        Matrix  I( n, n );
        for ( idx_t i = 0; i < n; ++i )
            I( i, i ) = 1.0;
        return I;
    }

    // rows x cols matrix with d on its leading diagonal
    static Matrix diagonal ( std::span< const double > d, idx_t rows, idx_t cols )
    {
        Matrix  D( rows, cols );
        for ( idx_t i = 0; i < std::min( { d.size(), rows, cols } ); ++i )
            D( i, i ) = d[i];
        return D;
    }

    static Matrix diagonal ( std::span< const double > d ) { return diagonal( d, d.size(), d.size() ); }

    idx_t rows  () const noexcept { return _rows; }
    idx_t cols  () const noexcept { return _cols; }
    idx_t size  () const noexcept { return _data.size(); }
    bool  empty () const noexcept { return _data.empty(); }

    double &        operator () ( idx_t i, idx_t j )       noexcept { return _data[ i * _cols + j ]; }
    double const &  operator () ( idx_t i, idx_t j ) const noexcept { return _data[ i * _cols + j ]; }

    std::span< double >        data ()       noexcept { return _data; }
    std::span< const double >  data () const noexcept { return _data; }

    std::span< double >        row ( idx_t i )       noexcept { return { _data.data() + i * _cols, _cols }; }
    std::span< const double >  row ( idx_t i ) const noexcept { return { _data.data() + i * _cols, _cols }; }

    bool same_shape ( Matrix const &  o ) const noexcept { return _rows == o._rows && _cols == o._cols; }

    bool operator == ( Matrix const & ) const = default;

    Matrix &  operator += ( Matrix const &  o );
    Matrix &  operator -= ( Matrix const &  o );
    Matrix &  operator *= ( double s ) noexcept
    {
        for ( auto &  x : _data ) x *= s;
        return *this;
    }

private:
    void check_finite () const
    {
        for ( auto  x : _data )
            if ( ! std::isfinite( x ) )
                throw validation_error( "matrix entries must be finite" );
    }

    idx_t                  _rows = 0;
    idx_t                  _cols = 0;
    std::vector< double >  _data;
};

namespace detail {

inline
std::string
shape_str ( Matrix const &  a )
{
    return std::to_string( a.rows() ) + "x" + std::to_string( a.cols() );
}

inline
void
require_same_shape ( Matrix const &  a, Matrix const &  b, char const *  what )
{
    if ( ! a.same_shape( b ) )
        throw shape_error( std::string( what ) + ": shape mismatch " + shape_str( a ) + " vs " + shape_str( b ) );
}

} // namespace detail

inline Matrix &
Matrix::operator += ( Matrix const &  o )
{
    detail::require_same_shape( *this, o, "operator+=" );
    for ( idx_t i = 0; i < _data.size(); ++i )
        _data[i] += o._data[i];
    return *this;
}

inline Matrix &
Matrix::operator -= ( Matrix const &  o )
{
    detail::require_same_shape( *this, o, "operator-=" );
    for ( idx_t i = 0; i < _data.size(); ++i )
        _data[i] -= o._data[i];
    return *this;
}

inline Matrix operator + ( Matrix a, Matrix const &  b ) { a += b; return a; }
inline Matrix operator - ( Matrix a, Matrix const &  b ) { a -= b; return a; }
inline Matrix operator * ( Matrix a, double s ) { a *= s; return a; }
inline Matrix operator * ( double s, Matrix a ) { a *= s; return a; }

// a * b
inline
Matrix
operator * ( Matrix const &  a, Matrix const &  b )
{
    if ( a.cols() != b.rows() )
        throw shape_error( "matmul: inner dimensions differ, " + detail::shape_str( a ) + " * " + detail::shape_str( b ) );

    Matrix  c( a.rows(), b.cols() );

    for ( idx_t i = 0; i < a.rows(); ++i )
    {
        auto  crow = c.row( i );
        for ( idx_t l = 0; l < a.cols(); ++l )
        {
            const double  ail = a( i, l );
            if ( ail == 0.0 )
                continue;
            auto  brow = b.row( l );
            for ( idx_t j = 0; j < b.cols(); ++j )
                crow[j] += ail * brow[j];
        }
    }

    return c;
}

inline
Matrix
transpose ( Matrix const &  a )
{
    Matrix  t( a.cols(), a.rows() );
    for ( idx_t i = 0; i < a.rows(); ++i )
        for ( idx_t j = 0; j < a.cols(); ++j )
            t( j, i ) = a( i, j );
    return t;
}

// aᵀ·b without forming the transpose
inline
Matrix
transpose_times ( Matrix const &  a, Matrix const &  b )
{
    if ( a.rows() != b.rows() )
        throw shape_error( "transpose_times: row counts differ, " + detail::shape_str( a ) + " vs " + detail::shape_str( b ) );

    Matrix  c( a.cols(), b.cols() );
    for ( idx_t l = 0; l < a.rows(); ++l )
    {
        auto  arow = a.row( l );
        auto  brow = b.row( l );
        for ( idx_t i = 0; i < a.cols(); ++i )
        {
            const double  ali = arow[i];
            if ( ali == 0.0 )
                continue;
            auto  crow = c.row( i );
            for ( idx_t j = 0; j < b.cols(); ++j )
                crow[j] += ali * brow[j];
        }
    }
    return c;
}

// a·bᵀ without forming the transpose
inline
Matrix
times_transpose ( Matrix const &  a, Matrix const &  b )
{
    if ( a.cols() != b.cols() )
        throw shape_error( "times_transpose: column counts differ, " + detail::shape_str( a ) + " vs " + detail::shape_str( b ) );

    Matrix  c( a.rows(), b.rows() );
    for ( idx_t i = 0; i < a.rows(); ++i )
    {
        auto  arow = a.row( i );
        for ( idx_t j = 0; j < b.rows(); ++j )
        {
            auto    brow = b.row( j );
            double  s    = 0.0;
            for ( idx_t l = 0; l < a.cols(); ++l )
                s += arow[l] * brow[l];
            c( i, j ) = s;
        }
    }
    return c;
}

inline
Matrix
hadamard ( Matrix const &  a, Matrix const &  b )
{
    detail::require_same_shape( a, b, "hadamard" );

    Matrix  c( a.rows(), a.cols() );
    auto    cd = c.data();
    auto    ad = a.data();
    auto    bd = b.data();
    for ( idx_t i = 0; i < cd.size(); ++i )
        cd[i] = ad[i] * bd[i];
    return c;
}

inline
double
frobenius_norm_squared ( Matrix const &  a ) noexcept
{
    double  s = 0.0;
    for ( auto  x : a.data() )
        s += x * x;
    return s;
}

// scaled accumulation, avoids overflow for huge entries
inline
double
frobenius_norm ( Matrix const &  a ) noexcept
{
    double  scale = 0.0;
    double  ssq   = 1.0;
    for ( auto  x : a.data() )
    {
        if ( x == 0.0 )
            continue;
        const double  ax = std::abs( x );
        if ( scale < ax )
        {
            ssq   = 1.0 + ssq * ( scale / ax ) * ( scale / ax );
            scale = ax;
        }
        else
            ssq += ( ax / scale ) * ( ax / scale );
    }
    return scale * std::sqrt( ssq );
}

// Frobenius inner product ⟨a, b⟩
inline
double
inner ( Matrix const &  a, Matrix const &  b )
{
    detail::require_same_shape( a, b, "inner" );
    double  s  = 0.0;
    auto    ad = a.data();
    auto    bd = b.data();
    for ( idx_t i = 0; i < ad.size(); ++i )
        s += ad[i] * bd[i];
    return s;
}

inline
double
max_abs ( Matrix const &  a ) noexcept
{
    double  m = 0.0;
    for ( auto  x : a.data() )
        m = std::max( m, std::abs( x ) );
    return m;
}

// columns [first, first+count) of a
inline
Matrix
columns ( Matrix const &  a, idx_t first, idx_t count )
{
    if ( first + count > a.cols() )
        throw shape_error( "columns: range [" + std::to_string( first ) + "," + std::to_string( first + count ) +
                           ") exceeds " + std::to_string( a.cols() ) + " columns" );

    Matrix  c( a.rows(), count );
    for ( idx_t i = 0; i < a.rows(); ++i )
        std::copy_n( a.row( i ).begin() + first, count, c.row( i ).begin() );
    return c;
}

// (a  b)
inline
Matrix
hcat ( Matrix const &  a, Matrix const &  b )
{
    if ( a.rows() != b.rows() )
        throw shape_error( "hcat: row counts differ, " + detail::shape_str( a ) + " vs " + detail::shape_str( b ) );

    Matrix  c( a.rows(), a.cols() + b.cols() );
    for ( idx_t i = 0; i < a.rows(); ++i )
    {
        std::copy( a.row( i ).begin(), a.row( i ).end(), c.row( i ).begin() );
        std::copy( b.row( i ).begin(), b.row( i ).end(), c.row( i ).begin() + a.cols() );
    }
    return c;
}

// splits (a1 a2) after column k
inline
std::pair< Matrix, Matrix >
split_columns ( Matrix const &  a, idx_t k )
{
    if ( k > a.cols() )
        throw validation_error( "split_columns: k = " + std::to_string( k ) + " exceeds " +
                                std::to_string( a.cols() ) + " columns" );
    return { columns( a, 0, k ), columns( a, k, a.cols() - k ) };
}

// ‖a − b‖_F / max(‖b‖_F, tiny)
inline
double
relative_difference ( Matrix const &  a, Matrix const &  b )
{
    detail::require_same_shape( a, b, "relative_difference" );
    const double  nb = frobenius_norm( b );
    const double  d  = frobenius_norm( a - b );
    return nb > 0.0 ? d / nb : d;
}

} // namespace wlra
