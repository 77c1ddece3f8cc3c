// Plain-JS glue for the wasm module. Build the package first:
//   wasm-pack build crates/web --target web --out-dir www/pkg
// then serve crates/web/www with any static file server.

import init, { enumerate, build_cocycle, verify } from "./pkg/hopfcw_web.js";

const $ = (id) => document.getElementById(id);

function renderFormula(el, tex) {
  el.textContent = "";
  if (window.katex) {
    try {
      // render each displayed line separately
      for (const chunk of tex.split(" \\\\ ")) {
        const div = document.createElement("div");
        window.katex.render(chunk, div, { displayMode: true, throwOnError: false });
        el.appendChild(div);
      }
      return;
    } catch (_) {
      /* fall through to raw text */
    }
  }
  el.textContent = tex;
}

function pairTable(data) {
  const rows = data.pairs
    .map(
      (p) =>
        `<tr><td>{${p.I.join(",")}}</td><td>{${p.J.join(",")}}</td><td>${p.degree}</td></tr>`
    )
    .join("");
  return `<table><tr><th>I</th><th>J</th><th>degree</th></tr>${rows}</table>
          <p>${data.pairs.length} admissible pair(s)</p>`;
}

async function main() {
  await init();

  $("ebtn").onclick = () => {
    const data = JSON.parse(enumerate(Number($("en").value), $("erel").checked));
    $("eout").innerHTML = data.error ? `<p class="fail">${data.error}</p>` : pairTable(data);
  };

  $("bbtn").onclick = () => {
    $("bformula").textContent = "computing…";
    setTimeout(() => {
      const data = JSON.parse(
        build_cocycle(
          Number($("bn").value),
          $("brel").checked,
          $("bi").value,
          $("bj").value,
          $("bmodel").value
        )
      );
      if (data.error) {
        $("bformula").innerHTML = `<span class="fail">${data.error}</span>`;
        $("bout").textContent = "";
        return;
      }
      renderFormula($("bformula"), data.latex || "(no nonzero components)");
      $("bout").textContent = JSON.stringify(data, null, 2);
    }, 20);
  };

  $("vbtn").onclick = () => {
    $("vstatus").textContent = "running exact trials…";
    setTimeout(() => {
      const data = JSON.parse(
        verify(
          Number($("bn").value),
          $("brel").checked,
          $("bi").value,
          $("bj").value,
          $("bmodel").value,
          Number($("vtrials").value),
          Number($("vseed").value)
        )
      );
      if (data.error) {
        $("vstatus").innerHTML = `<span class="fail">${data.error}</span>`;
        $("vout").textContent = "";
        return;
      }
      const cls = data.status === "PASS" ? "pass" : "fail";
      $("vstatus").innerHTML = `<span class="${cls}">${data.status}</span>`;
      $("vout").textContent = JSON.stringify(data, null, 2);
    }, 20);
  };
}

main();
