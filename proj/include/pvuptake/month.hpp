#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "pvuptake/errors.hpp"

namespace pvuptake {

/// A calendar month, the time step of every series in this library.
/// Serialized as "YYYY-MM". Ordering is chronological.
struct MonthIndex {
    int year = 0;
    int month = 1; // 1..12

    friend auto operator<=>(const MonthIndex&, const MonthIndex&) = default;

    /// Months since year 0, January. Used as the per-month RNG key, so it is
    /// independent of any scenario window.
    long long linear() const noexcept {
        return static_cast<long long>(year) * 12 + (month - 1);
    }

    static MonthIndex from_linear(long long code) {
        long long y = code / 12;
        int m = static_cast<int>(code % 12);
        if (m < 0) {
            m += 12;
            --y;
        }
        return MonthIndex{static_cast<int>(y), m + 1};
    }

    MonthIndex plus_months(int n) const { return from_linear(linear() + n); }

    MonthIndex next() const { return plus_months(1); }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }

    /// Parses "YYYY-MM" exactly; anything else (including month 00 or 13) is
    /// an input_errc::parse error naming the offending token.
    static MonthIndex parse(std::string_view text) {
        auto fail = [&] {
            throw input_error(input_errc::parse,
                              "invalid month '" + std::string(text) +
                                  "' (expected YYYY-MM with month 01..12)");
        };
        if (text.size() != 7 || text[4] != '-') fail();
        for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
            if (text[i] < '0' || text[i] > '9') fail();
        const int y = (text[0] - '0') * 1000 + (text[1] - '0') * 100 +
                      (text[2] - '0') * 10 + (text[3] - '0');
        const int m = (text[5] - '0') * 10 + (text[6] - '0');
        if (m < 1 || m > 12) fail();
        return MonthIndex{y, m};
    }
};

/// Signed number of months from `a` to `b` (positive when b is later).
inline long long months_between(MonthIndex a, MonthIndex b) {
    return b.linear() - a.linear();
}

} // namespace pvuptake
