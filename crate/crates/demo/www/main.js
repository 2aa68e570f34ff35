import init, { predict_table, degree_sequence, periodic_points } from "./pkg/orbitcount_demo.js";

const examples = {
  LINFRAC_SPECIAL: "a=2,b=3",
  LINFRAC_GENERAL: "a0=1,a1=2,a2=3,b0=5,b1=7,b2=11",
  HOST_PARASITE: "alpha=1,beta=1,gamma=1",
  SI_MODEL: "alpha=2",
  COMPETITIVE: "alpha=2,beta=3,a0=1,a1=2,a2=3,b0=5,b1=-7,b2=4",
  RATIONAL_PLANAR: "a=2,b=3,c=5,d=7",
  HOMOGENEOUS_D: "f=x^2 + y - 1/3; g=y^2 - 2*x + 1",
};

const $ = (id) => document.getElementById(id);
const out = $("out");

function show(run) {
  try {
    out.textContent = JSON.stringify(JSON.parse(run()), null, 2);
  } catch (e) {
    out.textContent = "error: " + e;
  }
}

await init();
out.textContent = "ready";
$("family").addEventListener("change", () => { $("params").value = examples[$("family").value]; });
$("predict").addEventListener("click", () => show(() => predict_table($("family").value, $("params").value, 1, 5)));
$("degrees").addEventListener("click", () => show(() => degree_sequence($("family").value, $("params").value, 5)));
$("census").addEventListener("click", () => show(() => periodic_points($("family").value, $("params").value, Number($("n").value))));
