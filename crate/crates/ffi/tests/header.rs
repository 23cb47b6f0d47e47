use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("bxshadow.h")
}

#[test]
fn header_declares_the_whole_api() {
    let text = std::fs::read_to_string(header()).expect("build script writes the header");
    for name in [
        "bxs_channel_new",
        "bxs_channel_free",
        "bxs_c_alpha",
        "bxs_snr_pdf",
        "bxs_snr_cdf",
        "bxs_snr_moment",
        "bxs_amount_of_fading",
        "bxs_cqei",
        "bxs_outage_probability",
        "bxs_outage_bounds",
        "bxs_average_ber_qam16",
        "bxs_sample_snr",
        "bxs_last_error_message",
        "bxs_version",
        "typedef struct BxsChannel BxsChannel",
        "BXS_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

/// Compiles a small C client against the header when a C compiler is present.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile_dir();
    let src = dir.join("client.c");
    std::fs::write(
        &src,
        r#"#include "bxshadow.h"
int query(void) {
    BxsParams p = {1.5, 2.5, 3.16, 0.316, 3.0, 10.0};
    BxsChannel *ch = NULL;
    double v = 0.0;
    BxsOutageBounds b;
    if (bxs_channel_new(&p, &ch) != BXS_STATUS_OK) return 1;
    bxs_outage_probability(ch, 2.0, &v);
    bxs_outage_bounds(ch, 2.0, &b);
    bxs_channel_free(ch);
    char msg[64];
    bxs_last_error_message(msg, sizeof msg);
    return bxs_version() == NULL;
}
"#,
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-c", "-o"])
        .arg(dir.join("client.o"))
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bxshadow-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
