use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use ideation_core::experiment::{read_export_csv, AnalysisRecord};
use ideation_core::ideas::{import_pool, IdeaPool};
use ideation_core::persona::{
    default_taxonomy, load_fixture_personas, parse_fixtures, render_persona, sample_persona, PersonaDescription,
    PersonaTemplate,
};

use crate::error::{CliError, CliResult};

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::data(e).context(path.display()))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(e).context(path.display()))
}

pub fn load_pool(path: &Path) -> CliResult<IdeaPool> {
    import_pool(open(path)?).map_err(|e| CliError::data(e).context(path.display()))
}

pub fn load_export(path: &Path) -> CliResult<Vec<AnalysisRecord>> {
    read_export_csv(open(path)?).map_err(|e| CliError::data(e).context(path.display()))
}

/// `fixtures`, `sample:N` (N personas sampled from the taxonomy and rendered
/// from the template, seeds `seed..seed+N`) or a fixture-format TOML file.
pub fn load_personas(spec: &str, seed: u64) -> CliResult<Vec<PersonaDescription>> {
    if spec == "fixtures" {
        return Ok(load_fixture_personas());
    }
    if let Some(n) = spec.strip_prefix("sample:") {
        let n: u64 = n.parse().map_err(|_| CliError::config(format!("bad persona count in {spec:?}")))?;
        let taxonomy = default_taxonomy();
        let template = PersonaTemplate::default();
        return (0..n)
            .map(|i| {
                let s = sample_persona(&taxonomy, seed + i, &format!("Persona {}", i + 1));
                render_persona(&s, &taxonomy, &template).map_err(CliError::from)
            })
            .collect();
    }
    let path = PathBuf::from(spec);
    let fixtures = parse_fixtures(&read_text(&path)?).map_err(|e| CliError::data(e).context(path.display()))?;
    Ok(fixtures.iter().map(|f| f.description()).collect())
}

/// Stories separated by blank lines.
pub fn read_story_file(path: &Path) -> CliResult<Vec<String>> {
    let text = read_text(path)?;
    let mut stories = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                stories.push(current.join(" "));
                current.clear();
            }
        } else {
            current.push(line.trim());
        }
    }
    if !current.is_empty() {
        stories.push(current.join(" "));
    }
    Ok(stories)
}

/// Two-column `value,group` CSV with a header row.
pub fn read_scores(path: &Path) -> CliResult<Vec<(f64, String)>> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() < 2 {
            return Err(CliError::data(format!("{}:{line}: expected value,group", path.display())));
        }
        let value: f64 = row[0]
            .trim()
            .parse()
            .map_err(|_| CliError::data(format!("{}:{line}: bad value {:?}", path.display(), &row[0])))?;
        out.push((value, row[1].trim().to_string()));
    }
    Ok(out)
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| CliError::data(format!("bad number {x:?}"))))
        .collect()
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, content: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, content),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, content: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::data(e).context(parent.display()))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::data(e).context(path.display()))
}
