#pragma once
//
// Module      : wlra/csv
// Description : minimal CSV builder: header row, comma separated, 17 significant digits, LF
//

#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wlra/io.hpp"

namespace wlra {

class CsvWriter
{
public:
    using field = std::variant< double, long long, std::string >;

    explicit CsvWriter ( std::vector< std::string > header )
        : _columns( header.size() )
    {
        append_row( header );
    }

    void add_row ( std::initializer_list< field > fields ) { add_row( std::vector< field >( fields ) ); }

    void add_row ( std::vector< field > const &  fields )
    {
        if ( fields.size() != _columns )
            throw internal_error( "csv: row has " + std::to_string( fields.size() ) + " fields, header has " +
                                  std::to_string( _columns ) );

        std::vector< std::string >  cells;
        cells.reserve( fields.size() );
        for ( auto const &  f : fields )
        {
            if ( auto  d = std::get_if< double >( &f ) )
                cells.push_back( format_double( *d ) );
            else if ( auto  i = std::get_if< long long >( &f ) )
                cells.push_back( std::to_string( *i ) );
            else
                cells.push_back( std::get< std::string >( f ) );
        }
        append_row( cells );
    }

    std::string const &  str () const noexcept { return _out; }

private:
    void append_row ( std::vector< std::string > const &  cells )
    {
        for ( idx_t  i = 0; i < cells.size(); ++i )
        {
            if ( i > 0 ) _out += ',';
            _out += cells[i];
        }
        _out += '\n';
    }

    idx_t        _columns;
    std::string  _out;
};

} // namespace wlra
