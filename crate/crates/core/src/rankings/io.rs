use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{
    HierarchicalRankingModel, MallowsModel, Metric, Ranking, RankingError, RankingFrame,
    RankingModel, RepOverride, VRule,
};

/// Reads rankings from CSV with header `rank_of_object_1,…,rank_of_object_m`.
pub fn read_rankings<R: Read>(reader: R) -> Result<Vec<Ranking>, RankingError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (k, name) in headers.iter().enumerate() {
        let expected = format!("rank_of_object_{}", k + 1);
        if name.trim() != expected {
            return Err(RankingError::Format(format!(
                "column {} is {name:?}, expected {expected:?}",
                k + 1
            )));
        }
    }
    let mut out = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let ranks = record
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<usize>()
                    .map_err(|e| RankingError::Format(format!("row {}: {e}", line + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Ranking::new(&ranks)?);
    }
    Ok(out)
}

pub fn write_rankings<W: Write>(
    writer: W,
    m: usize,
    rankings: &[Ranking],
) -> Result<(), RankingError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record((1..=m).map(|k| format!("rank_of_object_{k}")))?;
    for r in rankings {
        if r.m() != m {
            return Err(RankingError::SizeMismatch {
                expected: m,
                found: r.m(),
            });
        }
        wtr.write_record(r.ranks().iter().map(usize::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}

fn default_rep_rule() -> String {
    "standings".into()
}

/// JSON form of a ranking model; `m_prime: null` selects the Mallows family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub m: usize,
    #[serde(default)]
    pub m_prime: Option<usize>,
    #[serde(default)]
    pub metric: Metric,
    pub theta: f64,
    #[serde(rename = "pZ")]
    pub p_z: Vec<f64>,
    #[serde(default = "default_rep_rule")]
    pub rep_rule: String,
    #[serde(default)]
    pub overrides: Vec<RepOverride>,
    #[serde(default)]
    pub v_rule: VRule,
}

impl ModelDocument {
    pub fn frame(&self) -> Result<RankingFrame, RankingError> {
        if self.rep_rule != "standings" {
            return Err(RankingError::Format(format!(
                "unknown rep_rule {:?}",
                self.rep_rule
            )));
        }
        let mut frame = RankingFrame::new(self.m)?.with_v_rule(self.v_rule);
        if let Some(mp) = self.m_prime {
            frame = frame.with_depth(mp)?;
        }
        for o in &self.overrides {
            frame = frame.with_override(o.i0, o.j0)?;
        }
        Ok(frame)
    }

    pub fn to_model(&self) -> Result<RankingModel, RankingError> {
        let frame = self.frame()?;
        Ok(match self.m_prime {
            None => RankingModel::Mallows(MallowsModel::new(
                frame,
                self.metric,
                self.theta,
                self.p_z.clone(),
            )?),
            Some(_) => RankingModel::Hierarchical(HierarchicalRankingModel::new(
                frame,
                self.metric,
                self.theta,
                self.p_z.clone(),
            )?),
        })
    }

    pub fn from_model(model: &RankingModel) -> Self {
        let frame = model.frame();
        ModelDocument {
            m: frame.m(),
            m_prime: frame.m_prime(),
            metric: model.metric(),
            theta: model.theta(),
            p_z: model.p_z().to_vec(),
            rep_rule: default_rep_rule(),
            overrides: frame.overrides().to_vec(),
            v_rule: frame.v_rule(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let data = vec![Ranking::new(&[4, 2, 1, 3]).unwrap(), Ranking::identity(4)];
        let mut buf = Vec::new();
        write_rankings(&mut buf, 4, &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "rank_of_object_1,rank_of_object_2,rank_of_object_3,rank_of_object_4\n4,2,1,3\n"
        ));
        assert_eq!(read_rankings(buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "rank_of_object_1,rank_of_object_2,rank_of_object_3\n1,1,2\n";
        assert!(read_rankings(text.as_bytes()).is_err());
        let text = "a,b,c\n1,2,3\n";
        assert!(read_rankings(text.as_bytes()).is_err());
    }

    #[test]
    fn model_document_round_trip() {
        let json = r#"{"m": 5, "m_prime": 2, "metric": "cayley", "theta": -0.4,
            "pZ": [0.2, 0.2, 0.2, 0.2, 0.2], "rep_rule": "standings", "overrides": [{"i0": 2, "j0": 1}]}"#;
        let doc: ModelDocument = serde_json::from_str(json).unwrap();
        let model = doc.to_model().unwrap();
        assert!(matches!(model, RankingModel::Hierarchical(_)));
        assert_eq!(ModelDocument::from_model(&model), doc);
        let mallows: ModelDocument = serde_json::from_str(
            r#"{"m": 3, "m_prime": null, "theta": 0, "pZ": [0.5, 0.25, 0.25]}"#,
        )
        .unwrap();
        assert!(matches!(
            mallows.to_model().unwrap(),
            RankingModel::Mallows(_)
        ));
    }
}
