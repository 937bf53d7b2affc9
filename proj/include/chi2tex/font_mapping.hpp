#pragma once

#include "chi2tex/chi_reader.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chi2tex {

    enum class SymbolClass : std::uint8_t {
        cyrillic,
        math_latin,
        greek,
        operator_symbol,
        digit_punct,
        accent_piece,
        unknown,
    };

    /// Stable external names: "cyrillic", "math-latin", "greek", "operator",
    /// "digit-punct", "accent-piece", "unknown".
    std::string_view to_string(SymbolClass cls) noexcept;
    std::optional<SymbolClass> parse_symbol_class(std::string_view name) noexcept;

    /// Letter-like classes that force math mode.
    bool is_math_class(SymbolClass cls) noexcept;

    struct Symbol {
        SymbolClass cls = SymbolClass::unknown;
        std::string unicode;  // display form
        std::string latex;    // emission form; empty iff cls == unknown

        bool operator==(const Symbol&) const = default;
    };

    /// Cyrillic letter on the same key of the ЙЦУКЕН layout. Digits and most
    /// punctuation map to themselves; '^' and '&' map to ',' and '.' as on the
    /// typewriter digit row the manuscripts were typed with.
    char32_t jcuken_decode(std::uint8_t b) noexcept;

    /// Inverse of jcuken_decode on the 66 Cyrillic letters.
    std::optional<std::uint8_t> jcuken_encode(char32_t letter) noexcept;

    /// The 66 Cyrillic letters of the layout, lower case then upper case.
    std::u32string_view jcuken_letters() noexcept;

    std::string utf8_encode(char32_t cp);

    inline constexpr int font_slots = 10;

    class FontTables {
    public:
        enum class Provenance { builtin, file };

        static const FontTables& builtin();

        const Symbol& lookup(int font, std::uint8_t code) const noexcept;
        SymbolClass slot_class(int font) const noexcept;
        bool configured(int font) const noexcept { return slot_class(font) != SymbolClass::unknown; }
        Provenance provenance() const noexcept { return provenance_; }

        /// Replaces a slot's class and regenerates its default symbols.
        void set_slot_class(int font, SymbolClass cls);
        void set_symbol(int font, std::uint8_t code, Symbol symbol);
        void set_provenance(Provenance p) noexcept { provenance_ = p; }

    private:
        struct Slot {
            SymbolClass cls = SymbolClass::unknown;
            std::array<Symbol, 256> symbols;
        };

        FontTables();

        std::array<Slot, font_slots> slots_;
        Provenance provenance_ = Provenance::builtin;
    };

    /// Default operator slot carrying the big operators and accent pieces.
    inline constexpr int default_operator_font = 3;

    /// Builds tables from an optional config text:
    ///
    ///     [font.7]
    ///     class = greek
    ///     map.71 = ψ \psi
    ///     class.3E = accent-piece
    ///
    /// Sections overlay the builtin tables. A `class =` line resets the slot to
    /// that class's generated defaults before later `map.` lines apply.
    FontTables load_tables(std::optional<std::string_view> config);

    /// Total: unmapped (font, byte) pairs yield an unknown symbol.
    const Symbol& map_cell(const Cell& cell, const FontTables& tables) noexcept;

} // namespace chi2tex
