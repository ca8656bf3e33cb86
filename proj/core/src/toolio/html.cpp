#include "pentestxx/toolio/html.hpp"

#include <regex>

#include "pentestxx/common/strings.hpp"

namespace pentestxx::toolio {

namespace {

std::string attribute(const std::string& tag, const char* name) {
  const std::regex re(std::string(R"(\b)") + name + R"re(\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>]+)))re",
                      std::regex::icase);
  std::smatch m;
  if (!std::regex_search(tag, m, re)) return {};
  for (int i = 1; i <= 3; ++i) {
    if (m[i].matched) return m[i].str();
  }
  return {};
}

}  // namespace

bool HtmlForm::has_input_type(std::string_view type) const {
  for (const auto& in : inputs) {
    if (in.type == type) return true;
  }
  return false;
}

std::vector<std::string> extract_links(std::string_view html) {
  static const std::regex link_re(R"re(\b(?:href|src)\s*=\s*(?:"([^"]*)"|'([^']*)'))re", std::regex::icase);
  std::vector<std::string> links;
  std::string text(html);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), link_re); it != std::sregex_iterator(); ++it) {
    links.push_back((*it)[1].matched ? (*it)[1].str() : (*it)[2].str());
  }
  return links;
}

std::vector<HtmlForm> extract_forms(std::string_view html) {
  static const std::regex form_re(R"(<form\b([^>]*)>([\s\S]*?)</form>)", std::regex::icase);
  static const std::regex input_re(R"(<input\b[^>]*>)", std::regex::icase);
  std::vector<HtmlForm> forms;
  std::string text(html);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), form_re); it != std::sregex_iterator(); ++it) {
    HtmlForm form;
    const std::string open = "<form " + (*it)[1].str() + ">";
    form.action = attribute(open, "action");
    form.method = lower(attribute(open, "method"));
    if (form.method.empty()) form.method = "get";
    form.enctype = attribute(open, "enctype");
    const std::string body = (*it)[2].str();
    for (auto in = std::sregex_iterator(body.begin(), body.end(), input_re); in != std::sregex_iterator(); ++in) {
      const std::string tag = (*in)[0].str();
      FormInput input{attribute(tag, "name"), lower(attribute(tag, "type"))};
      if (input.type.empty()) input.type = "text";
      form.inputs.push_back(std::move(input));
    }
    forms.push_back(std::move(form));
  }
  return forms;
}

std::string url_origin(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos) return std::string(url);
  auto slash = url.find('/', scheme + 3);
  return std::string(url.substr(0, slash));
}

std::string resolve_url(std::string_view page_url, std::string_view ref) {
  if (ref.find("://") != std::string_view::npos) return std::string(ref);
  if (ref.starts_with('/')) return url_origin(page_url) + std::string(ref);
  std::string base(page_url.substr(0, page_url.find('?')));
  const auto origin = url_origin(base);
  auto last = base.rfind('/');
  if (last == std::string::npos || last < origin.size()) {
    base = origin + "/";
  } else {
    base = base.substr(0, last + 1);
  }
  return base + std::string(ref);
}

}  // namespace pentestxx::toolio
