import init, {
  convert_padt,
  render_conll_svg,
  render_conll_text,
  sample_padt,
  t_test,
} from "./pkg/i3rab_web.js";

const $ = (id) => document.getElementById(id);

// Runs `f`, showing a thrown error message in `errorId` instead.
function guarded(errorId, f) {
  $(errorId).textContent = "";
  try {
    f();
  } catch (e) {
    $(errorId).textContent = String(e);
  }
}

function runConvert() {
  guarded("conv-error", () => {
    const c = convert_padt($("padt").value, Number($("conv-index").value), $("conv-rtl").checked);
    $("conv-before").innerHTML = c.before_svg;
    $("conv-after").innerHTML = c.after_svg;
    $("conv-report").textContent = c.report;
    $("conv-output").value = c.output;
    c.free();
  });
}

function runRender() {
  guarded("tree-error", () => {
    const doc = $("tree").value;
    const i = Number($("tree-index").value);
    $("tree-svg").innerHTML = render_conll_svg(doc, i, $("tree-rtl").checked);
    $("tree-text").textContent = render_conll_text(doc, i);
  });
}

function runTTest() {
  guarded("t-error", () => {
    $("t-out").textContent = t_test($("t-base").value, $("t-new").value);
  });
}

await init();
const sample = sample_padt();
$("padt").value = sample;
$("conv-run").addEventListener("click", runConvert);
$("tree-run").addEventListener("click", runRender);
$("t-run").addEventListener("click", runTTest);
runConvert();
$("tree").value = $("conv-output").value.split("\n\n")[0] + "\n";
runRender();
runTTest();
