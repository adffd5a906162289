package examples;

import java.util.Set;
import javax.annotation.processing.AbstractProcessor;
import javax.annotation.processing.RoundEnvironment;
import javax.annotation.processing.SupportedAnnotationTypes;
import javax.annotation.processing.SupportedSourceVersion;
import javax.lang.model.SourceVersion;
import javax.lang.model.element.Element;
import javax.lang.model.element.ElementKind;
import javax.lang.model.element.Modifier;
import javax.lang.model.element.TypeElement;
import javax.tools.Diagnostic.Kind;

@SupportedAnnotationTypes("examples.Person")
@SupportedSourceVersion(SourceVersion.RELEASE_6)
public class PersonRequireProcessor extends AbstractProcessor
{
    @Override
    public boolean process(Set<? extends TypeElement> annotations,
                           RoundEnvironment objects)
    {
        for (Element elt : objects.getElementsAnnotatedWith(Person.class))
        {
            boolean ok = true;

            // check: require_public_class
            if (ok && isKind(elt, ElementKind.CLASS))
            {
                boolean holds = false;
                holds = holds || (isKind(elt, ElementKind.CLASS) && hasModifier(elt, Modifier.PUBLIC));
                if (!holds)
                {
                    ok = false;
                }
            }

            if (!ok)
            {
                this.processingEnv.getMessager().printMessage
                (
                    Kind.ERROR,
                    "The annotation @Person is disallowed for this location.",
                    elt
                );
            }
        }
        return true;
    }

    private static boolean isKind(Element e, ElementKind kind)
    {
        return e.getKind() == kind;
    }

    private static boolean hasModifier(Element e, Modifier modifier)
    {
        return e.getModifiers().contains(modifier);
    }
}
