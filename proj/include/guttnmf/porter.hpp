#ifndef GUTTNMF_PORTER_HPP
#define GUTTNMF_PORTER_HPP

#include <string>
#include <string_view>

namespace guttnmf {

/// Porter stemmer, the original 1980 algorithm. Input is expected to be
/// lowercase ASCII letters; words of length <= 2 are returned unchanged.
/// Within each step the longest matching suffix is selected first and its
/// condition is then tested; a failed condition does not fall through to a
/// shorter suffix.
std::string porter_stem(std::string_view word);

}  // namespace guttnmf

#endif
