#pragma once

#include <string>
#include <string_view>
#include <vector>

// Just enough HTML scraping to follow links and find login/upload forms in
// simple server-rendered pages.

namespace pentestxx::toolio {

struct FormInput {
  std::string name;
  std::string type;  // lowercased; "text" when absent
};

struct HtmlForm {
  std::string action;
  std::string method;   // lowercased
  std::string enctype;
  std::vector<FormInput> inputs;

  bool has_input_type(std::string_view type) const;
  bool is_login_form() const { return has_input_type("password"); }
  bool is_upload_form() const { return has_input_type("file"); }
};

/// href and src attribute values, in document order.
std::vector<std::string> extract_links(std::string_view html);
std::vector<HtmlForm> extract_forms(std::string_view html);

/// Resolves a relative reference against a page URL (no query merging).
std::string resolve_url(std::string_view page_url, std::string_view ref);

/// scheme://host[:port] prefix of a URL.
std::string url_origin(std::string_view url);

}  // namespace pentestxx::toolio
