use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha20Rng;

use egrant_engine::{constraint_client, request_generate};
use erbac_engine::{
    access_request_make, hierarchy_client, permission_assignment_client, role_assignment_client,
    role_request, CleartextHierarchy,
};
use espoon_engine::{attributes_request, policy_client_deploy, sat_request};
use policy_model::{parse_condition, parse_policy, AttributeSet, ConditionExpr, ConstraintSpec};
use sde_core::{make_rng, GroupProfile, PublicParams};

use store_service::store::{load_store, save_json_atomic};
use store_service::tkma::{tkma_forget, tkma_init, tkma_issue, TkmaState};
use store_service::{apply, load_json, serve, ClientKeyFile, Request, Response, ServiceError, StoreRoot};

#[derive(Parser)]
#[command(name = "sde-pdp", version, about = "Encrypted policy decision point")]
struct Cli {
    /// Store file; used when no --addr is given.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Route the verb to a running service instead of opening the store.
    #[arg(long, global = true)]
    addr: Option<String>,
    /// Deterministic randomness for reproducible runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the raw response as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Offline key authority operations.
    Tkma {
        #[command(subcommand)]
        command: TkmaCommand,
    },
    /// Store file management.
    Store {
        #[command(subcommand)]
        command: StoreCommand,
    },
    /// Administrator verbs (require the admin's client key).
    Admin {
        #[command(subcommand)]
        command: AdminCommand,
    },
    /// Requester verbs (require the requester's client key).
    Requester {
        #[command(subcommand)]
        command: RequesterCommand,
    },
    /// Serve the store over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7391")]
        listen: String,
    },
}

#[derive(Subcommand)]
enum TkmaCommand {
    /// Generate system parameters and a master secret.
    Init {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "prod", value_parser = parse_profile)]
        profile: GroupProfile,
    },
    /// Split a key pair for one user.
    Issue {
        #[arg(long)]
        tkma: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        client_out: PathBuf,
        #[arg(long)]
        server_out: PathBuf,
    },
    /// Allow re-issuing a previously issued identity.
    Forget {
        #[arg(long)]
        tkma: PathBuf,
        #[arg(long)]
        user: String,
    },
}

#[derive(Subcommand)]
enum StoreCommand {
    /// Create an empty store bound to the parameters in a key file.
    Init {
        #[arg(long)]
        key: PathBuf,
    },
    /// Print the full store state.
    Dump,
}

#[derive(Args)]
struct KeyArg {
    /// Client key file of the acting user.
    #[arg(long)]
    key: PathBuf,
}

#[derive(Subcommand)]
enum AdminCommand {
    /// Register a user's server key share.
    ImportKey {
        /// Server key file produced by `tkma issue`.
        #[arg(long)]
        key: PathBuf,
    },
    /// Deploy a policy written in the rule language.
    DeployPolicy {
        #[command(flatten)]
        key: KeyArg,
        /// e.g. "permit doctor read ward-record if Location=ward and AT<17#5"
        #[arg(long)]
        policy: String,
    },
    DeletePolicy {
        #[arg(long)]
        id: u64,
    },
    AssignRoles {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        requester: String,
        /// Comma-separated role names.
        #[arg(long)]
        roles: String,
        /// Activation condition in the rule language.
        #[arg(long)]
        activation: Option<String>,
    },
    AssignPermissions {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        role: String,
        /// Comma-separated action:target pairs, e.g. "read:record,write:chart".
        #[arg(long)]
        perms: String,
        /// Grant condition in the rule language.
        #[arg(long)]
        grant: Option<String>,
    },
    DeployHierarchy {
        #[command(flatten)]
        key: KeyArg,
        /// Comma-separated role names, index order.
        #[arg(long)]
        roles: String,
        /// Comma-separated derived>base index pairs, e.g. "1>0,2>0".
        #[arg(long)]
        edges: String,
    },
    /// Deploy an HBDSoD or Chinese Wall constraint from a JSON spec file.
    DeployConstraint {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        spec: PathBuf,
    },
    DeleteConstraint {
        #[arg(long)]
        id: u64,
    },
    RevokeUser {
        #[arg(long)]
        user: String,
    },
}

#[derive(Subcommand)]
enum RequesterCommand {
    ActivateRole {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        role: String,
        /// Comma-separated attributes, e.g. "Location=ward,AT=10#5".
        #[arg(long, default_value = "")]
        attrs: String,
    },
    DeactivateRole {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        role: String,
    },
    /// Base policy evaluation over a subject/action/target tuple.
    Request {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        action: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "")]
        attrs: String,
    },
    /// RBAC access check against the active session.
    Access {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        role: String,
        #[arg(long)]
        action: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "")]
        attrs: String,
    },
    /// Constraint-checked grant; updates access history on permit.
    Egrant {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        role: String,
        #[arg(long)]
        action: String,
        #[arg(long)]
        object_type: String,
        #[arg(long)]
        instance: String,
        /// Comma-separated conflict-domain path, outermost first.
        #[arg(long, default_value = "")]
        domains: String,
        #[arg(long, default_value = "")]
        context: String,
    },
}

fn parse_profile(s: &str) -> Result<GroupProfile, String> {
    match s {
        "toy" => Ok(GroupProfile::Toy),
        "test" => Ok(GroupProfile::Test),
        "prod" => Ok(GroupProfile::Prod),
        _ => Err(format!("unknown profile {s:?} (expected toy, test or prod)")),
    }
}

fn parse_attrs(spec: &str) -> Result<AttributeSet, ServiceError> {
    let mut attrs = AttributeSet::new();
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| ServiceError::Other(format!("attribute {part:?} is not name=value")))?;
        let (name, value) = (name.trim(), value.trim());
        match value.split_once('#') {
            Some((v, bits)) => {
                let v: u64 = v
                    .parse()
                    .map_err(|_| ServiceError::Other(format!("bad numeric value in {part:?}")))?;
                let bits: u32 = bits
                    .parse()
                    .map_err(|_| ServiceError::Other(format!("bad bit width in {part:?}")))?;
                attrs.add_numeric(name, v, bits).map_err(|e| ServiceError::Other(e.to_string()))?;
            }
            None => {
                attrs.add_string(name, value).map_err(|e| ServiceError::Other(e.to_string()))?
            }
        }
    }
    Ok(attrs)
}

fn parse_list(spec: &str) -> Vec<String> {
    spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_edges(spec: &str) -> Result<Vec<(usize, usize)>, ServiceError> {
    spec.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (d, b) = p
                .split_once('>')
                .ok_or_else(|| ServiceError::Other(format!("edge {p:?} is not derived>base")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| ServiceError::Other(format!("bad index in edge {p:?}")))
            };
            Ok((parse(d)?, parse(b)?))
        })
        .collect()
}

fn parse_opt_condition(spec: &Option<String>) -> Result<Option<ConditionExpr>, ServiceError> {
    spec.as_deref()
        .map(|s| parse_condition(s).map_err(|e| ServiceError::Other(e.to_string())))
        .transpose()
}

/// Key files double as the parameter source for every client-side round.
fn load_client_key(path: &Path) -> Result<ClientKeyFile, ServiceError> {
    let key: ClientKeyFile = load_json(path)?;
    if key.format != store_service::tkma::CLIENT_KEY_FORMAT {
        return Err(ServiceError::BadFormat(path.display().to_string(), key.format));
    }
    Ok(key)
}

struct Ctx {
    store: Option<PathBuf>,
    addr: Option<String>,
    rng: ChaCha20Rng,
    json: bool,
}

impl Ctx {
    /// Runs one verb: over the wire when --addr is given, otherwise against
    /// the store file with an atomic save on success.
    fn dispatch(&self, req: Request) -> Result<Response, ServiceError> {
        if let Some(addr) = &self.addr {
            return store_service::wire::call(addr, &req);
        }
        let path = self
            .store
            .as_ref()
            .ok_or_else(|| ServiceError::Other("either --store or --addr is required".into()))?;
        let mut store = load_store(path)?;
        let resp = apply(&req, &mut store);
        if resp.ok && req.mutates() {
            save_json_atomic(path, &store)?;
        }
        Ok(resp)
    }

    fn finish(&self, resp: Response, deny_reason: &str) -> ExitCode {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&resp).expect("response serializes"));
        } else if let Some(err) = &resp.error {
            eprintln!("error: {err}");
        } else if let Some(dump) = &resp.dump {
            println!("{}", serde_json::to_string_pretty(dump).expect("store serializes"));
        } else {
            match (resp.decision, resp.id) {
                (Some(true), _) => println!("permit"),
                (Some(false), _) => println!("deny ({deny_reason})"),
                (None, Some(id)) => println!("ok id={id}"),
                (None, None) => println!("ok"),
            }
        }
        if !resp.ok {
            ExitCode::from(2)
        } else if resp.decision == Some(false) {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, ServiceError> {
    let mut ctx =
        Ctx { store: cli.store, addr: cli.addr, rng: make_rng(cli.seed), json: cli.json };
    match cli.command {
        Command::Tkma { command } => run_tkma(command, &mut ctx),
        Command::Store { command } => run_store(command, &mut ctx),
        Command::Admin { command } => run_admin(command, &mut ctx),
        Command::Requester { command } => run_requester(command, &mut ctx),
        Command::Serve { listen } => {
            let path = ctx
                .store
                .ok_or_else(|| ServiceError::Other("serve requires --store".into()))?;
            let store = load_store(&path)?;
            let listener = TcpListener::bind(&listen)?;
            eprintln!("listening on {listen}");
            serve(listener, store, path)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_tkma(cmd: TkmaCommand, ctx: &mut Ctx) -> Result<ExitCode, ServiceError> {
    match cmd {
        TkmaCommand::Init { out, profile } => {
            let state = tkma_init(profile, &mut ctx.rng)?;
            save_json_atomic(&out, &state)?;
            println!("ok");
        }
        TkmaCommand::Issue { tkma, user, client_out, server_out } => {
            let mut state: TkmaState = load_json(&tkma)?;
            let (client, server) = tkma_issue(&mut state, &user, &mut ctx.rng)?;
            save_json_atomic(&client_out, &client)?;
            save_json_atomic(&server_out, &server)?;
            save_json_atomic(&tkma, &state)?;
            println!("ok");
        }
        TkmaCommand::Forget { tkma, user } => {
            let mut state: TkmaState = load_json(&tkma)?;
            let removed = tkma_forget(&mut state, &user);
            save_json_atomic(&tkma, &state)?;
            println!("{}", if removed { "ok" } else { "not-issued" });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_store(cmd: StoreCommand, ctx: &mut Ctx) -> Result<ExitCode, ServiceError> {
    match cmd {
        StoreCommand::Init { key } => {
            #[derive(serde::Deserialize)]
            struct ParamsOnly {
                params: PublicParams,
            }
            let path = ctx
                .store
                .as_ref()
                .ok_or_else(|| ServiceError::Other("store init requires --store".into()))?;
            let source: ParamsOnly = load_json(&key)?;
            save_json_atomic(path, &StoreRoot::new(source.params))?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        StoreCommand::Dump => {
            let resp = ctx.dispatch(Request::Dump)?;
            Ok(ctx.finish(resp, ""))
        }
    }
}

fn run_admin(cmd: AdminCommand, ctx: &mut Ctx) -> Result<ExitCode, ServiceError> {
    let (req, deny_reason) = match cmd {
        AdminCommand::ImportKey { key } => {
            let file: store_service::ServerKeyFile = load_json(&key)?;
            if file.format != store_service::tkma::SERVER_KEY_FORMAT {
                return Err(ServiceError::BadFormat(key.display().to_string(), file.format));
            }
            (Request::ImportKey { params: file.params, server: file.server }, "")
        }
        AdminCommand::DeployPolicy { key, policy } => {
            let key = load_client_key(&key.key)?;
            let statement =
                parse_policy(&policy).map_err(|e| ServiceError::Other(e.to_string()))?;
            let client =
                policy_client_deploy(&statement, &key.client, &key.params, &mut ctx.rng)?;
            (Request::DeployPolicy { admin_id: key.client.user_id.clone(), policy: client }, "")
        }
        AdminCommand::DeletePolicy { id } => (Request::DeletePolicy { policy_id: id }, "no-such-policy"),
        AdminCommand::AssignRoles { key, requester, roles, activation } => {
            let key = load_client_key(&key.key)?;
            let cond = parse_opt_condition(&activation)?;
            let assignment = role_assignment_client(
                &parse_list(&roles),
                cond.as_ref(),
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (
                Request::AssignRoles {
                    admin_id: key.client.user_id.clone(),
                    requester_id: requester,
                    assignment,
                },
                "",
            )
        }
        AdminCommand::AssignPermissions { key, role, perms, grant } => {
            let key = load_client_key(&key.key)?;
            let cond = parse_opt_condition(&grant)?;
            let pairs: Vec<(String, String)> = parse_list(&perms)
                .into_iter()
                .map(|p| {
                    p.split_once(':')
                        .map(|(a, t)| (a.trim().to_string(), t.trim().to_string()))
                        .ok_or_else(|| {
                            ServiceError::Other(format!("permission {p:?} is not action:target"))
                        })
                })
                .collect::<Result<_, _>>()?;
            let assignment = permission_assignment_client(
                &role,
                &pairs,
                cond.as_ref(),
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (Request::AssignPermissions { admin_id: key.client.user_id.clone(), assignment }, "")
        }
        AdminCommand::DeployHierarchy { key, roles, edges } => {
            let key = load_client_key(&key.key)?;
            let graph =
                CleartextHierarchy { roles: parse_list(&roles), edges: parse_edges(&edges)? };
            let hierarchy = hierarchy_client(&graph, &key.client, &key.params, &mut ctx.rng)?;
            (Request::DeployHierarchy { admin_id: key.client.user_id.clone(), hierarchy }, "")
        }
        AdminCommand::DeployConstraint { key, spec } => {
            let key = load_client_key(&key.key)?;
            let spec: ConstraintSpec = load_json(&spec)?;
            let constraint = constraint_client(&spec, &key.client, &key.params, &mut ctx.rng)?;
            (Request::DeployConstraint { admin_id: key.client.user_id.clone(), constraint }, "")
        }
        AdminCommand::DeleteConstraint { id } => {
            (Request::DeleteConstraint { constraint_id: id }, "no-such-constraint")
        }
        AdminCommand::RevokeUser { user } => (Request::RevokeUser { user_id: user }, "no-such-user"),
    };
    let resp = ctx.dispatch(req)?;
    Ok(ctx.finish(resp, deny_reason))
}

fn run_requester(cmd: RequesterCommand, ctx: &mut Ctx) -> Result<ExitCode, ServiceError> {
    let (req, deny_reason) = match cmd {
        RequesterCommand::ActivateRole { key, role, attrs } => {
            let key = load_client_key(&key.key)?;
            let request = role_request(&role, &key.client, &key.params, &mut ctx.rng)?;
            let attrs = attributes_request(
                &parse_attrs(&attrs)?,
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (Request::Activate { request, attrs }, "activation-refused")
        }
        RequesterCommand::DeactivateRole { key, role } => {
            let key = load_client_key(&key.key)?;
            let request = role_request(&role, &key.client, &key.params, &mut ctx.rng)?;
            (Request::Deactivate { request }, "not-active")
        }
        RequesterCommand::Request { key, subject, action, target, attrs } => {
            let key = load_client_key(&key.key)?;
            let tuple = policy_model::SatTuple { subject, action, target };
            let request = sat_request(&tuple, &key.client, &key.params, &mut ctx.rng)?;
            let attrs = attributes_request(
                &parse_attrs(&attrs)?,
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (Request::Evaluate { request, attrs }, "no-matching-policy")
        }
        RequesterCommand::Access { key, role, action, target, attrs } => {
            let key = load_client_key(&key.key)?;
            let request =
                access_request_make(&role, &action, &target, &key.client, &key.params, &mut ctx.rng)?;
            let attrs = attributes_request(
                &parse_attrs(&attrs)?,
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (Request::Access { request, attrs }, "no-permission")
        }
        RequesterCommand::Egrant { key, role, action, object_type, instance, domains, context } => {
            let key = load_client_key(&key.key)?;
            let request = request_generate(
                &role,
                &action,
                &object_type,
                &instance,
                &parse_list(&domains),
                &parse_attrs(&context)?,
                &key.client,
                &key.params,
                &mut ctx.rng,
            )?;
            (Request::Egrant { request }, "constraint-violation")
        }
    };
    let resp = ctx.dispatch(req)?;
    Ok(ctx.finish(resp, deny_reason))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
