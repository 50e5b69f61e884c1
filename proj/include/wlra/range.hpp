#pragma once
//
// Module      : wlra/range
// Description : parsing of numeric sweep lists: comma-separated items, each a
//               single value or an inclusive range "a:step:b"
//

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "wlra/error.hpp"

namespace wlra {

namespace detail {

inline
double
parse_range_number ( std::string_view  tok, std::string_view  whole )
{
    while ( ! tok.empty() && tok.front() == ' ' ) tok.remove_prefix( 1 );
    while ( ! tok.empty() && tok.back() == ' ' ) tok.remove_suffix( 1 );

    double      v   = 0.0;
    auto const  res = std::from_chars( tok.data(), tok.data() + tok.size(), v );
    if ( tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || ! std::isfinite( v ) )
        throw validation_error( "range: cannot parse '" + std::string( tok ) + "' in '" + std::string( whole ) + "'" );
    return v;
}

} // namespace detail

// "1:50:1000" → 1, 51, ..., 951; "1e2,1e3" → 100, 1000; endpoints inclusive
inline
std::vector< double >
parse_range ( std::string_view  text )
{
    std::vector< double >  out;
    if ( text.find_first_not_of( ' ' ) == std::string_view::npos )
        return out;

    std::size_t  pos = 0;
    while ( pos <= text.size() )
    {
        std::size_t       end  = std::min( text.find( ',', pos ), text.size() );
        std::string_view  item = text.substr( pos, end - pos );
        pos = end + 1;

        std::vector< std::string_view >  parts;
        for ( std::size_t  p = 0; ; )
        {
            std::size_t  c = item.find( ':', p );
            parts.push_back( item.substr( p, c == std::string_view::npos ? std::string_view::npos : c - p ) );
            if ( c == std::string_view::npos )
                break;
            p = c + 1;
        }

        if ( parts.size() == 1 )
            out.push_back( detail::parse_range_number( parts[0], text ) );
        else if ( parts.size() == 3 )
        {
            const double  a    = detail::parse_range_number( parts[0], text );
            const double  step = detail::parse_range_number( parts[1], text );
            const double  b    = detail::parse_range_number( parts[2], text );
            if ( ! ( step > 0.0 ) )
                throw validation_error( "range: step must be positive in '" + std::string( item ) + "'" );
            if ( b < a )
                throw validation_error( "range: end below start in '" + std::string( item ) + "'" );

            const double  count = std::floor( ( b - a ) / step + 1e-9 );
            if ( count > 1e7 )
                throw validation_error( "range: too many points in '" + std::string( item ) + "'" );
            for ( long long  i = 0; i <= (long long) count; ++i )
                out.push_back( a + double( i ) * step );
        }
        else
            throw validation_error( "range: expected 'value' or 'start:step:end', got '" + std::string( item ) + "'" );
    }
    return out;
}

// as parse_range, requiring non-negative integers
inline
std::vector< std::size_t >
parse_index_range ( std::string_view  text )
{
    std::vector< std::size_t >  out;
    for ( double  v : parse_range( text ) )
    {
        if ( v < 0.0 || v != std::floor( v ) )
            throw validation_error( "range: expected non-negative integers in '" + std::string( text ) + "'" );
        out.push_back( std::size_t( v ) );
    }
    return out;
}

} // namespace wlra
