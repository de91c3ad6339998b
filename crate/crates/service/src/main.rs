use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;
use scopone_service::{router, Service, ServiceConfig};

/// Serve live Scopone matches over HTTP.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Directory for the match index and logs.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Lower edge of the AI move delay window, in milliseconds.
    #[arg(long, default_value_t = 1000)]
    delay_min_ms: u64,
    /// Upper edge of the AI move delay window, in milliseconds.
    #[arg(long, default_value_t = 4000)]
    delay_max_ms: u64,
    /// Token required by the study export (also read from SCOPONE_ADMIN_TOKEN).
    #[arg(long, env = "SCOPONE_ADMIN_TOKEN")]
    admin_token: Option<String>,
    /// Fixed seed for ids, seats and deals (testing only).
    #[arg(long)]
    seed: Option<u64>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let mut cfg = ServiceConfig::new(&args.data_dir);
    cfg.delay = (Duration::from_millis(args.delay_min_ms), Duration::from_millis(args.delay_max_ms));
    cfg.admin_token = args.admin_token;
    cfg.seed = args.seed;
    let svc = Service::open(cfg).with_context(|| format!("opening {}", args.data_dir.display()))?;
    svc.resume();
    let listener = tokio::net::TcpListener::bind(args.bind).await.with_context(|| format!("binding {}", args.bind))?;
    log::info!("listening on {}", args.bind);
    axum::serve(listener, router(svc))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
