#pragma once

#include <string>
#include <string_view>

namespace hallucorrect {

/// Visible article text of an HTML page, one block per line.
///
/// The content root is the largest <article>, else <main> / role="main",
/// else <body>. Inside it, scripts, navigation, headers, footers, asides,
/// forms and elements whose class or id names boilerplate (menu, sidebar,
/// cookie, share, related, comment, advert, ...) are dropped, and blocks
/// made mostly of link text are discarded.
std::string extract_article_text(std::string_view html);

std::string extract_title(std::string_view html);

}  // namespace hallucorrect
